#pragma once

#include "kinb/gevrey.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kinb {

struct WeightSettings {
    std::optional<double> alpha;  // absent: min(alpha_md(m, d), nu)
    std::optional<double> beta;   // absent: beta_recommendation
    std::optional<double> lambda; // absent: no cutoff

    bool operator==(const WeightSettings&) const = default;
};

struct InductionSettings {
    Part part = Part::I;
    std::optional<double> lambda0;
    std::optional<int> n_max;
    int m = 2;
    std::optional<double> M; // absent: max(2 A_m + 1, empirical K1)
    std::optional<double> B; // absent: no L2 cap
    std::optional<double> T0;
    std::optional<double> theta0;
    std::optional<double> vartheta0;

    bool operator==(const InductionSettings&) const = default;
};

struct Config {
    RunConfig run;
    WeightSettings weight;
    InductionSettings induction;

    bool operator==(const Config& o) const;
};

Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const Config& c);

double resolved_alpha(const Config& c);

void write_snapshot(std::ostream& out, const SpectralState& s);
void write_snapshot(const std::filesystem::path& path, const SpectralState& s);
SpectralState read_snapshot(std::istream& in);
SpectralState read_snapshot(const std::filesystem::path& path);
std::string snapshot_name(std::size_t index);

// Strict CSV: comma separated, finite numbers or the token NA, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
double parse_number(const std::string& token);
std::optional<double> parse_optional(const std::string& token);
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

void write_run_csv_header(std::ostream& out);
void write_run_csv_row(std::ostream& out, const Monitor& m);

// Schedule with defaults filled in. Without explicit M and beta the order is
// beta0 from M0 = 2 A_m + 1, then K1(beta0), then M = max(M0, K1), then beta from M.
struct ResolvedInduction {
    InductionSchedule schedule;
    double A = 0.0;
    double K1 = 0.0;
};
ResolvedInduction resolve_induction(const Config& c, const Trajectory& traj);

// Snapshots snapshot_*.csv of a simulate output directory, in time order.
Trajectory load_run(const std::filesystem::path& dir);

void write_induction_csv(std::ostream& out, const std::vector<HypRow>& rows);

} // namespace kinb
