#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bounce {

enum class CriterionStatus { pass, fail, skipped };

struct CriterionResult {
    int id = 0;
    std::string name;
    CriterionStatus status = CriterionStatus::fail;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::optional<double> t_tol;      ///< overrides the default event-time tolerance
    int threads = 1;
    std::vector<int> only;            ///< empty runs every criterion
    std::filesystem::path scratch;    ///< working directory for file outputs
};

inline constexpr int criterion_count = 11;

[[nodiscard]] bool oracle_available() noexcept;

[[nodiscard]] CriterionResult run_criterion(int id, const AcceptanceOptions &options);

/// Runs the selected criteria, printing one line per criterion as it finishes.
[[nodiscard]] std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options, std::ostream &out);

/// "[PASS] 3 name: detail (0.12 s)"
[[nodiscard]] std::string format_result(const CriterionResult &result);

} // namespace bounce
