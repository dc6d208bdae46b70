#include "kinb/io.hpp"

#include "kinb/inequalities.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace kinb {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"grid", {"dimension", "mode", "n", "eta_max", "stencil"}},
        {"kernel", {"nu", "kappa"}},
        {"quad", {"theta_min", "panels", "nodes_per_panel", "azimuthal_nodes"}},
        {"time", {"dt", "t_end", "snapshots"}},
        {"init", {"kind", "mass", "sigma", "a", "center", "weights", "centers", "sigmas"}},
        {"weight", {"alpha", "beta", "lambda"}},
        {"induction", {"part", "lambda0", "n_max", "m", "M", "B", "T0", "theta0", "vartheta0"}},
    };
    return keys;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string text(const std::string& key) const
    {
        if (!has(key)) throw ConfigError("missing [" + name_ + "] " + key);
        return trim(tree_->get<std::string>(key));
    }

    double number(const std::string& key) const
    {
        try {
            return parse_number(text(key));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] " + key + " is not a finite number");
        }
    }

    int integer(const std::string& key) const
    {
        const double v = number(key);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("[" + name_ + "] " + key + " must be an integer");
        return int(v);
    }

    std::optional<double> maybe(const std::string& key) const
    {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    std::vector<double> list(const std::string& key) const
    {
        std::vector<double> out;
        for (const auto& tok : split(text(key), ',')) {
            try {
                out.push_back(parse_number(tok));
            } catch (const std::exception&) {
                throw ConfigError("[" + name_ + "] " + key + " must be a comma separated list of numbers");
            }
        }
        return out;
    }

    Freq vector(const std::string& text_value, int d) const
    {
        std::istringstream in(text_value);
        Freq v = Freq::Zero();
        std::string tok;
        int i = 0;
        while (in >> tok) {
            if (i >= d) throw ConfigError("[" + name_ + "] vector has more than " + std::to_string(d) + " components");
            try {
                v[i++] = parse_number(tok);
            } catch (const std::exception&) {
                throw ConfigError("[" + name_ + "] vector component '" + tok + "' is not a number");
            }
        }
        if (i != d) throw ConfigError("[" + name_ + "] vector needs " + std::to_string(d) + " components");
        return v;
    }

private:
    const pt::ptree* tree_;
    std::string name_;
};

std::string vec_text(const Freq& v, int d)
{
    std::string out;
    for (int i = 0; i < d; ++i) {
        if (i) out += ' ';
        out += format_number(v[i]);
    }
    return out;
}

} // namespace

bool Config::operator==(const Config& o) const
{
    auto same_datum = [](const InitialDatum& a, const InitialDatum& b) {
        if (a.kind != b.kind || a.components.size() != b.components.size()) return false;
        for (std::size_t i = 0; i < a.components.size(); ++i) {
            const auto &x = a.components[i], &y = b.components[i];
            if (x.weight != y.weight || x.width != y.width || x.center != y.center) return false;
        }
        return true;
    };
    return run.grid == o.run.grid && run.cs == o.run.cs && run.quad == o.run.quad && run.dt == o.run.dt
           && run.t_end == o.run.t_end && run.snapshots == o.run.snapshots && same_datum(run.datum, o.run.datum)
           && weight == o.weight && induction == o.induction;
}

Config parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        const auto it = allowed_keys().find(section);
        if (it == allowed_keys().end()) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' outside a section");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
    auto section = [&](const std::string& name) {
        const auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name);
    };

    Config c;
    RunConfig& r = c.run;
    const Section grid = section("grid");
    r.grid.dimension = grid.integer("dimension");
    r.grid.mode = parse_grid_mode(grid.text("mode"));
    r.grid.n = grid.integer("n");
    r.grid.eta_max = grid.number("eta_max");
    if (grid.has("stencil")) r.grid.stencil = grid.integer("stencil");
    r.grid.validate();
    const int d = r.grid.dimension;

    const Section kernel = section("kernel");
    r.cs.dimension = d;
    r.cs.nu = kernel.number("nu");
    r.cs.kappa = kernel.has("kappa") ? kernel.number("kappa") : 1.0;
    r.cs.validate();

    const Section quad = section("quad");
    if (quad.has("theta_min")) r.quad.theta_min = quad.number("theta_min");
    if (quad.has("panels")) r.quad.panels = quad.integer("panels");
    if (quad.has("nodes_per_panel")) r.quad.nodes_per_panel = quad.integer("nodes_per_panel");
    if (quad.has("azimuthal_nodes")) r.quad.azimuthal_nodes = quad.integer("azimuthal_nodes");
    r.quad.validate(r.cs);

    const Section time = section("time");
    r.dt = time.number("dt");
    r.t_end = time.number("t_end");
    r.snapshots = time.has("snapshots") ? time.list("snapshots") : std::vector<double>{0.0, r.t_end};

    const Section init = section("init");
    const DatumKind kind = parse_datum_kind(init.text("kind"));
    const double mass = init.has("mass") ? init.number("mass") : 1.0;
    const Freq center = init.has("center") ? init.vector(init.text("center"), d) : Freq::Zero();
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (init.has(k)) throw ConfigError(std::string("[init] ") + k + " does not apply to kind " + to_string(kind));
    };
    switch (kind) {
    case DatumKind::gaussian:
        forbid({"a", "weights", "centers", "sigmas"});
        r.datum = InitialDatum::gaussian(init.has("sigma") ? init.number("sigma") : 1.0, mass, center);
        break;
    case DatumKind::laplace:
        forbid({"sigma", "weights", "centers", "sigmas"});
        r.datum = InitialDatum::laplace(init.has("a") ? init.number("a") : 1.0, mass, center);
        break;
    case DatumKind::gaussian_mixture: {
        forbid({"a", "sigma", "mass", "center"});
        const std::vector<double> w = init.list("weights");
        const std::vector<double> s = init.list("sigmas");
        const std::vector<std::string> cs = split(init.text("centers"), ';');
        if (w.size() != s.size() || w.size() != cs.size())
            throw ConfigError("[init] weights, sigmas and centers must have equal length");
        std::vector<Component> parts;
        for (std::size_t i = 0; i < w.size(); ++i) parts.push_back({w[i], init.vector(cs[i], d), s[i]});
        r.datum = InitialDatum::mixture(parts);
        break;
    }
    }
    r.validate();

    const Section weight = section("weight");
    c.weight.alpha = weight.maybe("alpha");
    c.weight.beta = weight.maybe("beta");
    c.weight.lambda = weight.maybe("lambda");
    if (c.weight.alpha && !(*c.weight.alpha > 0.0 && *c.weight.alpha < 1.0)) throw ConfigError("[weight] alpha must lie in (0,1)");
    if (c.weight.beta && !(*c.weight.beta >= 0.0)) throw ConfigError("[weight] beta must be nonnegative");
    if (c.weight.lambda && !(*c.weight.lambda > 0.0)) throw ConfigError("[weight] lambda must be positive");

    const Section ind = section("induction");
    InductionSettings& s = c.induction;
    if (ind.has("part")) s.part = parse_part(ind.text("part"));
    s.lambda0 = ind.maybe("lambda0");
    if (ind.has("n_max")) s.n_max = ind.integer("n_max");
    if (ind.has("m")) s.m = ind.integer("m");
    s.M = ind.maybe("M");
    s.B = ind.maybe("B");
    s.T0 = ind.maybe("T0");
    s.theta0 = ind.maybe("theta0");
    s.vartheta0 = ind.maybe("vartheta0");
    if (s.m < 2) throw ConfigError("[induction] m must be at least 2");
    if (s.part != Part::I && d < 2) throw ConfigError("[induction] parts II and III need dimension at least 2");
    if (s.n_max && *s.n_max < 0) throw ConfigError("[induction] n_max must be nonnegative");
    if (s.lambda0 && !(*s.lambda0 > 0.0)) throw ConfigError("[induction] lambda0 must be positive");
    if (s.T0 && !(*s.T0 > 0.0)) throw ConfigError("[induction] T0 must be positive");
    if (s.part == Part::III) {
        const double bound = theta0_bound(resolved_alpha(c), s.m);
        if (s.theta0 && *s.theta0 > bound) {
            std::ostringstream msg;
            msg << "[induction] theta0 = " << *s.theta0
                << " violates eps(alpha, cot^2(theta0/2)) <= 2m/(2m+2); bisection gives the largest admissible theta0 = "
                << bound;
            throw ConfigError(msg.str());
        }
    }
    return c;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    return parse_config(in);
}

double resolved_alpha(const Config& c)
{
    if (c.weight.alpha) return *c.weight.alpha;
    return std::min(alpha_md(c.induction.m, c.run.grid.dimension), c.run.cs.nu);
}

void write_config(std::ostream& out, const Config& c)
{
    const RunConfig& r = c.run;
    const int d = r.grid.dimension;
    out << "[grid]\n"
        << "dimension = " << d << "\n"
        << "mode = " << to_string(r.grid.mode) << "\n"
        << "n = " << r.grid.n << "\n"
        << "eta_max = " << format_number(r.grid.eta_max) << "\n"
        << "stencil = " << r.grid.stencil << "\n\n";
    out << "[kernel]\n"
        << "nu = " << format_number(r.cs.nu) << "\n"
        << "kappa = " << format_number(r.cs.kappa) << "\n\n";
    out << "[quad]\n"
        << "theta_min = " << format_number(r.quad.theta_min) << "\n"
        << "panels = " << r.quad.panels << "\n"
        << "nodes_per_panel = " << r.quad.nodes_per_panel << "\n"
        << "azimuthal_nodes = " << r.quad.azimuthal_nodes << "\n\n";
    out << "[time]\n"
        << "dt = " << format_number(r.dt) << "\n"
        << "t_end = " << format_number(r.t_end) << "\n"
        << "snapshots = ";
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) out << (i ? ", " : "") << format_number(r.snapshots[i]);
    out << "\n\n[init]\nkind = " << to_string(r.datum.kind) << "\n";
    if (r.datum.kind == DatumKind::gaussian_mixture) {
        std::string w, s, ctr;
        for (std::size_t i = 0; i < r.datum.components.size(); ++i) {
            const auto& comp = r.datum.components[i];
            w += (i ? ", " : "") + format_number(comp.weight);
            s += (i ? ", " : "") + format_number(comp.width);
            ctr += (i ? "; " : "") + vec_text(comp.center, d);
        }
        out << "weights = " << w << "\nsigmas = " << s << "\ncenters = " << ctr << "\n";
    } else {
        const auto& comp = r.datum.components.front();
        out << "mass = " << format_number(comp.weight) << "\n"
            << (r.datum.kind == DatumKind::laplace ? "a = " : "sigma = ") << format_number(comp.width) << "\n"
            << "center = " << vec_text(comp.center, d) << "\n";
    }
    out << "\n[weight]\n";
    if (c.weight.alpha) out << "alpha = " << format_number(*c.weight.alpha) << "\n";
    if (c.weight.beta) out << "beta = " << format_number(*c.weight.beta) << "\n";
    if (c.weight.lambda) out << "lambda = " << format_number(*c.weight.lambda) << "\n";
    const InductionSettings& s = c.induction;
    out << "\n[induction]\npart = " << to_string(s.part) << "\nm = " << s.m << "\n";
    if (s.lambda0) out << "lambda0 = " << format_number(*s.lambda0) << "\n";
    if (s.n_max) out << "n_max = " << *s.n_max << "\n";
    if (s.M) out << "M = " << format_number(*s.M) << "\n";
    if (s.B) out << "B = " << format_number(*s.B) << "\n";
    if (s.T0) out << "T0 = " << format_number(*s.T0) << "\n";
    if (s.theta0) out << "theta0 = " << format_number(*s.theta0) << "\n";
    if (s.vartheta0) out << "vartheta0 = " << format_number(*s.vartheta0) << "\n";
}

std::string format_number(double v)
{
    if (!std::isfinite(v)) throw NumericalError("refusing to write a non-finite number");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string("NA");
}

double parse_number(const std::string& token)
{
    const std::string t = trim(token);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw std::invalid_argument("not a finite number: '" + token + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& token)
{
    if (trim(token) == "NA") return std::nullopt;
    return parse_number(token);
}

std::string snapshot_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", index);
    return buf;
}

void write_snapshot(std::ostream& out, const SpectralState& s)
{
    const GridSpec& g = s.grid;
    out << "# t = " << format_number(s.t) << "\n"
        << "# d = " << g.dimension << "\n"
        << "# mode = " << to_string(g.mode) << "\n"
        << "# n = " << g.n << "\n"
        << "# eta_max = " << format_number(g.eta_max) << "\n"
        << "# stencil = " << g.stencil << "\n";
    if (g.mode == GridMode::full2d) out << "# columns = ix,iy,eta_x,eta_y,re,im\n";
    else out << "# columns = i,eta,re,im\n";
    const int side = g.side();
    const int off = g.full() ? g.n - 1 : 0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
        const Freq eta = s.node(k);
        if (g.mode == GridMode::full2d)
            out << int(k % side) - off << ',' << int(k / side) - off << ',' << format_number(eta[0]) << ','
                << format_number(eta[1]);
        else
            out << int(k) - off << ',' << format_number(eta[0]);
        out << ',' << format_number(s.values[k].real()) << ',' << format_number(s.values[k].imag()) << '\n';
    }
}

void write_snapshot(const std::filesystem::path& path, const SpectralState& s)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snapshot " + path.string());
    write_snapshot(out, s);
    if (!out) throw std::runtime_error("failed writing snapshot " + path.string());
}

SpectralState read_snapshot(std::istream& in)
{
    std::map<std::string, std::string> header;
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("snapshot header line without '='");
            header[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
        } else {
            rows.push_back(line);
        }
    }
    for (const char* key : {"t", "d", "mode", "n", "eta_max"})
        if (!header.count(key)) throw std::invalid_argument(std::string("snapshot header lacks ") + key);
    GridSpec g;
    g.dimension = int(parse_number(header["d"]));
    g.mode = parse_grid_mode(header["mode"]);
    g.n = int(parse_number(header["n"]));
    g.eta_max = parse_number(header["eta_max"]);
    if (header.count("stencil")) g.stencil = int(parse_number(header["stencil"]));
    g.validate();
    if (Eigen::Index(rows.size()) != g.size()) throw std::invalid_argument("snapshot row count does not match grid");
    Eigen::VectorXcd v(g.size());
    const std::size_t cols = g.mode == GridMode::full2d ? 6 : 4;
    const int side = g.side();
    const int off = g.full() ? g.n - 1 : 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto f = split(rows[k], ',');
        if (f.size() != cols) throw std::invalid_argument("snapshot row " + std::to_string(k) + " has wrong column count");
        if (g.mode == GridMode::full2d) {
            if (int(parse_number(f[0])) != int(k % side) - off || int(parse_number(f[1])) != int(k / side) - off)
                throw std::invalid_argument("snapshot rows out of order");
        } else if (int(parse_number(f[0])) != int(k) - off) {
            throw std::invalid_argument("snapshot rows out of order");
        }
        v[Eigen::Index(k)] = cplx(parse_number(f[cols - 2]), parse_number(f[cols - 1]));
    }
    return make_state(g, parse_number(header["t"]), v);
}

SpectralState read_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read snapshot " + path.string());
    return read_snapshot(in);
}

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("csv has no column '" + name + "'");
    return std::size_t(it - header.begin());
}

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv is empty");
    t.header = split(line, ',');
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != t.header.size()) throw std::invalid_argument("csv row has wrong column count");
        for (const auto& f : fields) {
            if (f == "NA" || f == "true" || f == "false") continue;
            parse_number(f);
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    return read_csv(in);
}

void write_run_csv_header(std::ostream& out)
{
    out << "t,mass,energy,entropy,sup_ratio,tail\n";
}

void write_run_csv_row(std::ostream& out, const Monitor& m)
{
    out << format_number(m.t) << ',' << format_number(m.mass) << ',' << format_number(m.energy) << ','
        << format_optional(m.entropy) << ',' << format_number(m.sup_ratio) << ',' << format_number(m.tail) << '\n';
}

void write_induction_csv(std::ostream& out, const std::vector<HypRow>& rows)
{
    out << "N,scale,t,hyp1,hyp2,hyp3,empirical_M,weighted_l2,cap_ok,pass\n";
    for (const auto& r : rows)
        out << r.N << ',' << format_number(r.scale) << ',' << format_number(r.t) << ',' << format_number(r.hyp1) << ','
            << format_optional(r.hyp2) << ',' << format_optional(r.hyp3) << ',' << format_number(r.empirical_M) << ','
            << format_number(r.weighted_l2) << ',' << (r.cap_ok ? "true" : "false") << ','
            << (r.pass ? "true" : "false") << '\n';
}

ResolvedInduction resolve_induction(const Config& c, const Trajectory& traj)
{
    if (traj.snapshots.empty()) throw ConfigError("induction: run directory holds no snapshots");
    const InductionSettings& in = c.induction;
    const GridSpec& grid = traj.snapshots.front().grid;
    if (!(grid == c.run.grid)) throw ConfigError("induction: snapshot grid differs from the config grid");
    const int d = grid.dimension;
    ResolvedInduction out;
    InductionSchedule& s = out.schedule;
    s.part = in.part;
    s.m = in.m;
    s.alpha = resolved_alpha(c);
    s.lambda0 = in.lambda0.value_or(default_lambda0(in.part, d));
    s.T0 = in.T0.value_or(c.run.t_end);
    if (traj.snapshots.back().t < s.T0 * (1.0 - 1e-12))
        throw ConfigError("induction: snapshots do not cover [0, T0]");
    const double limit = grid.eta_max / std::sqrt(2.0);
    if (in.n_max) {
        s.n_max = *in.n_max;
    } else {
        s.n_max = max_scale_index(s.lambda0, s.factor, limit);
        if (s.n_max < 0) {
            std::ostringstream msg;
            msg << "schedule exceeds grid: Lambda_0 = " << s.lambda0 << " > eta_max/sqrt(2) = " << limit
                << "; raise eta_max";
            throw ConfigError(msg.str());
        }
    }
    if (s.part == Part::III) {
        s.theta0 = in.theta0.value_or(std::min(theta0_bound(s.alpha, s.m), 0.999 * std::numbers::pi / 4.0));
        s.vartheta0 = in.vartheta0.value_or(0.5 * s.theta0);
    }
    s.B = in.B.value_or(std::numeric_limits<double>::infinity());

    out.A = moment_bound(traj, s.m);
    const double M0 = 2.0 * out.A + 1.0;
    BetaInputs bi;
    bi.T0 = s.T0;
    bi.alpha = s.alpha;
    bi.part = s.part;
    bi.M2 = s.part == Part::III ? moment_bound(traj, 2) : 1.0;
    bi.theta0 = s.theta0;
    bi.vartheta0 = s.vartheta0;
    auto beta_for = [&](double M) {
        bi.M = M;
        return beta_recommendation(bi, c.run.cs);
    };
    const double top = std::sqrt(2.0) * s.scale(s.n_max);
    const double beta0 = c.weight.beta.value_or(beta_for(in.M.value_or(M0)));
    out.K1 = empirical_k1(traj, s.alpha, beta0, s.T0, s.m, top);
    s.M = in.M.value_or(std::max(M0, out.K1));
    s.beta = c.weight.beta.value_or(beta_for(s.M));
    return out;
}

Trajectory load_run(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) throw ConfigError("run directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    Trajectory traj;
    for (const auto& f : files) {
        SpectralState s = read_snapshot(f);
        traj.monitors.push_back(monitor(s));
        traj.snapshots.push_back(std::move(s));
    }
    std::sort(traj.snapshots.begin(), traj.snapshots.end(),
              [](const SpectralState& a, const SpectralState& b) { return a.t < b.t; });
    std::sort(traj.monitors.begin(), traj.monitors.end(), [](const Monitor& a, const Monitor& b) { return a.t < b.t; });
    return traj;
}

} // namespace kinb
