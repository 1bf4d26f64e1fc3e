#include <iostream>

#include "bounce/acceptance.hpp"
#include "bounce/parallel.hpp"

int main()
{
    bounce::AcceptanceOptions options;
    options.threads = bounce::thread_count();
    int passed = 0;
    const auto results = bounce::run_acceptance(options, std::cout);
    for (const auto &r : results) {
        passed += r.status == bounce::CriterionStatus::pass ? 1 : 0;
    }
    std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
    return passed == static_cast<int>(results.size()) ? 0 : 1;
}
