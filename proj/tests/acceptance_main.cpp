// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. Optional arguments select individual criteria by number.

#include <cstdlib>
#include <iostream>
#include <thread>
#include <vector>

#include "kirchlab/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    const unsigned hw = std::thread::hardware_concurrency();
    return kirchlab::acceptance::run_and_print(ids, hw ? int(hw) : 2, std::cout);
}
