#include "lsavg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "lsavg/ls_integrals.hpp"
#include "lsavg/raster.hpp"
#include "lsavg/tubes.hpp"
#include "lsavg/weights_union.hpp"
#include "lsavg/whitney.hpp"

namespace lsavg::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool has_prefix(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

const std::vector<std::string> kSpecPrefixes{"spec.", "g1.", "g2.", "g3."};

}  // namespace

// ---------------------------------------------------------------------------
// configuration

Config Config::parse(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineNo) + ": empty key");
        if (kv.count(key)) throw InvalidArgument("config line " + std::to_string(lineNo) + ": duplicate key " + key);
        kv[key] = trim(line.substr(eq + 1));
    }
    return Config(std::move(kv));
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lsavg::Error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::real(const std::string& key) const {
    if (!has(key)) throw InvalidArgument("config: missing key " + key);
    return parse_real(kv_.at(key));
}

double Config::real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

int Config::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = real(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("config: " + key + " must be an integer");
    return static_cast<int>(v);
}

std::vector<double> Config::reals(const std::string& key) const {
    if (!has(key)) throw InvalidArgument("config: missing key " + key);
    std::vector<double> out;
    std::istringstream in(kv_.at(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(item));
    }
    if (out.empty()) throw InvalidArgument("config: " + key + " is empty");
    return out;
}

Point Config::point(const std::string& key) const {
    if (!has(key)) throw InvalidArgument("config: missing key " + key);
    return parse_point(kv_.at(key));
}

bool Config::has_spec(const std::string& prefix) const { return has(prefix + "kind"); }

DomainSpec Config::spec(const std::string& prefix) const {
    if (!has_spec(prefix)) throw InvalidArgument("config: missing " + prefix + "kind");
    std::map<std::string, std::string> sub;
    for (const auto& [k, v] : kv_)
        if (has_prefix(k, prefix)) sub[k.substr(prefix.size())] = v;
    DomainSpec s = from_kv(sub);
    validate(s);
    return s;
}

std::optional<Weight> Config::weight() const {
    const std::string kind = text("weight.kind");
    if (kind.empty()) return std::nullopt;
    if (kind == "constant") return Weight::constant(real("weight.value", 1.0));
    if (kind == "power") return Weight::power(point("weight.center"), real("weight.beta"));
    throw InvalidArgument("config: unknown weight.kind " + kind);
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "z0",           "z",           "s",           "s_grid",         "t",           "h",
        "h_list",       "truncations", "stencil",     "r",              "n_balls",     "radii",
        "weight.kind",  "weight.value", "weight.center", "weight.beta", "tubes.family", "tubes.jmax",
        "tubes.alpha",  "tubes.n",     "whitney.family", "whitney.n",   "whitney.jmax", "whitney.lmax",
        "whitney.alpha", "whitney.h",  "whitney.imax", "poincare.j",   "poincare.p",  "poincare.jmax"};
    return keys;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> subs{"rasterize", "solve", "integrate", "sweep", "scan",
                                               "poincare",  "tubes", "whitney",   "union", "report"};
    return subs;
}

void Config::check_schema() const {
    const auto& keys = known_keys();
    for (const auto& [k, v] : kv_) {
        const bool spec = std::any_of(kSpecPrefixes.begin(), kSpecPrefixes.end(),
                                      [&](const std::string& p) { return has_prefix(k, p); });
        if (!spec && std::find(keys.begin(), keys.end(), k) == keys.end())
            throw InvalidArgument("config: unknown key " + k);
    }
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const Config& config, std::uint64_t seed) {
    std::string canon;
    for (const auto& [k, v] : config.values()) canon += k + "=" + v + "\n";
    canon += "seed=" + std::to_string(seed) + "\n";
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canon);
    return os.str();
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

struct Run {
    const Options& opt;
    const Config& cfg;
    std::ostream& out;
    json summary = json::object();
    std::vector<std::string> artifacts;

    fs::path path(const std::string& name) const { return fs::path(opt.outDir) / name; }

    template <class F>
    void write(const std::string& name, F&& body) {
        std::ofstream os(path(name), std::ios::binary);
        if (!os) throw lsavg::Error("cannot write " + path(name).string());
        body(os);
        if (!os) throw lsavg::Error("write failed for " + path(name).string());
        artifacts.push_back(name);
    }

    Stencil stencil() const { return parse_stencil(cfg.text("stencil", "full")); }
    SweepOptions sweep_options() const { return SweepOptions{stencil(), opt.threads}; }

    std::vector<double> s_list() const { return cfg.has("s_grid") ? cfg.reals("s_grid") : cfg.reals("s"); }
};

json to_json(const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.n; ++i) a.push_back(p[i]);
    return a;
}

int do_rasterize(Run& run) {
    const DomainSpec spec = run.cfg.spec("spec.");
    const RasterPtr r = rasterize(spec, run.cfg.real("h"));
    run.write("rasterize.csv", [&](std::ostream& os) { write_raster_csv(os, *r); });
    run.summary["spec"] = spec.id();
    run.summary["inside_cells"] = r->insideCount;
    run.summary["volume_estimate"] = r->volumeEstimate;
    run.summary["truncation"] = r->truncation.note;
    return Ok;
}

int do_solve(Run& run) {
    const DomainSpec spec = run.cfg.spec("spec.");
    const RasterPtr r = rasterize(spec, run.cfg.real("h"));
    const QhField f = solve(r, run.cfg.point("z0"), run.stencil());
    run.write("solve.field.csv", [&](std::ostream& os) { write_field_csv(os, f); });
    run.summary["spec"] = spec.id();
    run.summary["base"] = to_json(f.snappedBase);
    run.summary["reachable_cells"] = f.reachable_count();
    if (run.cfg.has("z")) {
        const Geodesic g = geodesic(f, run.cfg.point("z"));
        run.summary["k_at_z"] = g.weightSum;
        run.summary["geodesic_cells"] = g.cells.size();
        run.out << "k(z, z0) = " << format_real(g.weightSum) << '\n';
    }
    return Ok;
}

int do_integrate(Run& run) {
    const DomainSpec spec = run.cfg.spec("spec.");
    const RasterPtr r = rasterize(spec, run.cfg.real("h"));
    const QhField f = solve(r, run.cfg.point("z0"), run.stencil());
    const auto w = run.cfg.weight();
    std::vector<LsValue> vals;
    const auto sList = run.s_list();
    for (double s : sList) vals.push_back(ls_integral(f, s, w));
    run.write("integrate.csv", [&](std::ostream& os) {
        os << "s,raw,mass,normalized,cells,unreachable\n";
        for (std::size_t i = 0; i < sList.size(); ++i) {
            os << format_real(sList[i]) << ',' << format_real(vals[i].raw) << ',' << format_real(vals[i].mass) << ','
               << format_real(vals[i].normalized) << ',' << vals[i].cells << ',' << vals[i].unreachable << '\n';
        }
    });
    run.summary["spec"] = spec.id();
    run.summary["weight"] = w ? w->describe() : "constant(1)";
    if (w && run.cfg.has("r")) {
        std::vector<double> radii = run.cfg.has("radii") ? run.cfg.reals("radii") : std::vector<double>{0.05, 0.1, 0.2};
        const ArEstimate ar = ar_estimate(*w, *r, run.cfg.real("r"), run.cfg.integer("n_balls", 200), radii, run.opt.seed);
        run.summary["ar_estimate"] = ar.estimate;
        run.summary["ar_best_center"] = to_json(ar.bestCenter);
        run.summary["ar_best_radius"] = ar.bestRadius;
        run.summary["ar_note"] = ar.note;
    }
    if (run.cfg.has("t")) {
        const HolderReport hr = holder_check(f, w, run.cfg.real("t"), sList.back());
        run.summary["holder"] = {{"t", hr.t}, {"s", hr.s}, {"lt", hr.lt}, {"ls", hr.ls}, {"holds", hr.holds}};
        if (!hr.holds) throw lsavg::Error("discrete Hoelder comparison failed; quadrature is inconsistent");
    }
    return Ok;
}

int do_sweep(Run& run) {
    const DomainSpec spec = run.cfg.spec("spec.");
    const auto reps = refinement_sweep(spec, run.cfg.point("z0"), run.s_list(), run.cfg.reals("h_list"),
                                       run.cfg.reals("truncations"), run.sweep_options());
    run.write("sweep.csv", [&](std::ostream& os) { write_report_csv(os, reps); });
    bool inconclusive = false;
    json cls = json::array();
    for (const auto& r : reps) {
        cls.push_back({{"s", r.s}, {"classification", to_string(r.classification)}, {"slope", r.slope}});
        inconclusive = inconclusive || r.classification == Trend::Inconclusive;
        run.out << "s = " << format_real(r.s) << ": " << to_string(r.classification) << '\n';
    }
    run.summary["spec"] = spec.id();
    run.summary["classifications"] = cls;
    return inconclusive ? Inconclusive : Ok;
}

int do_scan(Run& run) {
    const DomainSpec spec = run.cfg.spec("spec.");
    const ScanResult sr = threshold_scan(spec, run.cfg.point("z0"), run.s_list(), run.cfg.reals("h_list"),
                                         run.cfg.reals("truncations"), run.sweep_options());
    run.write("scan.csv", [&](std::ostream& os) { write_report_csv(os, sr.reports); });
    run.summary["spec"] = spec.id();
    run.summary["bracket"] = json::array({sr.largestSaturating ? json(*sr.largestSaturating) : json(nullptr),
                                          sr.smallestGrowing ? json(*sr.smallestGrowing) : json(nullptr)});
    run.summary["estimate"] = sr.estimate ? json(*sr.estimate) : json(nullptr);
    run.summary["note"] = sr.note;
    if (sr.largestSaturating && sr.smallestGrowing) {
        run.out << "critical s in [" << format_real(*sr.largestSaturating) << ", " << format_real(*sr.smallestGrowing)
                << "]\n";
        return Ok;
    }
    run.out << "no bracket: " << sr.note << '\n';
    return Inconclusive;
}

int do_poincare(Run& run) {
    const double p = run.cfg.real("poincare.p", 2.0);
    const double h = run.cfg.real("h", 1.0 / 256);
    const int jmax = run.cfg.integer("poincare.jmax", 12);
    std::vector<PoincareResult> rs;
    for (double j : run.cfg.reals("poincare.j")) rs.push_back(poincare_ratio(static_cast<int>(j), p, h, jmax));
    run.write("poincare.csv", [&](std::ostream& os) {
        os << "j,p,truncated_j,numerator,denominator,ratio,lower_bound\n";
        for (const auto& r : rs) {
            os << r.j << ',' << format_real(r.p) << ',' << r.truncatedJ << ',' << format_real(r.numerator) << ','
               << format_real(r.denominator) << ',' << format_real(r.ratio) << ',' << format_real(r.lowerBound) << '\n';
        }
    });
    run.summary["rows"] = rs.size();
    return Ok;
}

TubeFamily tube_family(const Config& cfg, int jmax) {
    const std::string fam = cfg.text("tubes.family", "rooms");
    if (fam == "rooms") return rooms_halls_tubes(jmax);
    if (fam == "diskrooms") return disk_rooms_tubes(jmax);
    if (fam == "cusp") return cusp_tubes(cfg.real("tubes.alpha", 3.0), cfg.integer("tubes.n", 2), jmax);
    if (fam == "blocks") return block_tubes(cfg.integer("tubes.n", 2), jmax);
    throw InvalidArgument("config: unknown tubes.family " + fam);
}

DomainSpec tube_domain(const Config& cfg, int jmax) {
    if (cfg.has_spec("spec.")) return cfg.spec("spec.");
    const std::string fam = cfg.text("tubes.family", "rooms");
    if (fam == "rooms") return RoomsAndHalls{jmax};
    if (fam == "diskrooms") return DiskAndRooms{jmax};
    if (fam == "cusp") return Cusp{cfg.real("tubes.alpha", 3.0), cfg.integer("tubes.n", 2), 0.0};
    return BlockTower{cfg.integer("tubes.n", 2), (1 << (jmax + 1)) - 1};
}

int do_tubes(Run& run) {
    const int jmax = run.cfg.integer("tubes.jmax", 8);
    const TubeFamily fam = tube_family(run.cfg, jmax);
    const DomainSpec spec = tube_domain(run.cfg, jmax);
    VerifyOptions vo;
    vo.tol = run.opt.tol;
    int code = Ok;
    json certs = json::array();
    for (double s : run.s_list()) {
        const Certificate cert = certify_not_averaging(spec, fam, s, vo);
        const std::string tag = "tubes.s" + format_real(s);
        run.write(tag + ".series.csv", [&](std::ostream& os) { write_series_csv(os, cert.series); });
        run.write(tag + ".certificate.txt", [&](std::ostream& os) { write_certificate(os, cert); });
        certs.push_back({{"s", s},
                         {"issued", cert.issued},
                         {"series", to_string(cert.series.classification)},
                         {"reason", cert.reason}});
        run.out << "s = " << format_real(s) << ": " << (cert.issued ? "certificate issued" : "refused: " + cert.reason)
                << '\n';
        if (!cert.issued) code = Refused;
    }
    run.summary["family"] = fam.name;
    run.summary["spec"] = spec.id();
    run.summary["certificates"] = certs;
    return code;
}

int do_whitney(Run& run) {
    const std::string fam = run.cfg.text("whitney.family", "cube");
    const int n = run.cfg.integer("whitney.n", 2);
    const int jmax = run.cfg.integer("whitney.jmax", 3);
    const double h = run.cfg.real("whitney.h", 1.0 / 256);
    ValidationOptions vo;
    vo.seed = run.opt.seed;
    std::vector<SubdivisionSet> sets;
    json series = json::array();
    std::optional<ValidationReport> vr;
    if (fam == "cube") {
        sets = cube_cells(n, jmax);
        vr = validate_subdivision(sets, *rasterize(UnitCube{n}, h), 2.0 * std::sqrt(static_cast<double>(n)), vo);
        for (double s : run.s_list()) {
            const SeriesReport sr = cube_bound_series(n, s, jmax);
            series.push_back({{"s", s}, {"classification", to_string(sr.classification)}});
        }
    } else if (fam == "cusp") {
        const double alpha = run.cfg.real("whitney.alpha", 3.0);
        sets = cusp_family(alpha, n, jmax, run.cfg.integer("whitney.lmax", 4));
        vr = validate_subdivision(sets, *rasterize(Cusp{alpha, n, 0.0}, h), cusp_distance_factor(alpha), vo);
        for (double s : run.s_list()) {
            const CuspSeriesReport cr = cusp_upper_series(alpha, n, s, 20, 1LL << 14);
            series.push_back({{"s", s},
                              {"classification", to_string(cr.series.classification)},
                              {"j_ratio", cr.jRatio},
                              {"series_condition", cr.seriesCondition},
                              {"theorem_condition", cr.theoremCondition}});
        }
    } else if (fam == "blocks") {
        for (double s : run.s_list()) {
            const BlockSeriesReport br = block_upper_series(n, s, (1LL << 16) - 1, run.cfg.integer("whitney.imax", 40));
            series.push_back({{"s", s},
                              {"classification", to_string(br.series.classification)},
                              {"converges", br.converges},
                              {"critical_s", br.criticalS}});
        }
    } else {
        throw InvalidArgument("config: unknown whitney.family " + fam);
    }
    if (!sets.empty()) run.write("whitney.sets.csv", [&](std::ostream& os) { write_subdivision_csv(os, sets); });
    run.summary["family"] = fam;
    run.summary["series"] = series;
    if (vr) {
        run.summary["validation"] = {{"sets", vr->sets},
                                     {"overlap_violations", vr->overlapViolations},
                                     {"covered_fraction", vr->coveredFraction},
                                     {"connected", vr->connected},
                                     {"star_violations", vr->starViolations},
                                     {"star_skipped", vr->starSkipped},
                                     {"whitney_violations", vr->whitneyViolations},
                                     {"messages", vr->messages}};
        if (!vr->ok()) {
            run.out << "subdivision validation failed\n";
            return Error;
        }
    }
    return Ok;
}

int do_union(Run& run) {
    std::vector<DomainSpec> specs{run.cfg.spec("g1."), run.cfg.spec("g2.")};
    if (run.cfg.has_spec("g3.")) specs.push_back(run.cfg.spec("g3."));
    const auto reps = union_chain(specs, run.cfg.point("z0"), run.cfg.real("h"), run.cfg.real("s", 2.0), run.cfg.weight());
    bool ok = true;
    json steps = json::array();
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const std::string tag = "union.step" + std::to_string(i + 1);
        run.write(tag + ".csv", [&](std::ostream& os) { write_union_csv(os, reps[i]); });
        run.write(tag + ".summary.txt", [&](std::ostream& os) { write_union_summary(os, reps[i]); });
        steps.push_back({{"ok", reps[i].ok()},
                         {"pointwise_violations", reps[i].pointwiseViolations},
                         {"C1", reps[i].C1},
                         {"C2", reps[i].C2},
                         {"bound", reps[i].bound},
                         {"mean", reps[i].mean}});
        ok = ok && reps[i].ok();
    }
    run.summary["steps"] = steps;
    run.out << (ok ? "union checks passed\n" : "union checks failed\n");
    return ok ? Ok : Error;
}

int do_report(Run& run, const std::string& ownHash) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(run.opt.outDir)) {
        const std::string name = e.path().filename().string();
        if (name.size() > 14 && name.ends_with(".manifest.json") && name != "report.manifest.json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw lsavg::Error("report: no manifests in " + run.opt.outDir);
    json runs = json::array();
    std::string hash;
    for (const auto& f : files) {
        std::ifstream in(f);
        const json m = json::parse(in);
        const std::string h = m.at("config_hash").get<std::string>();
        if (hash.empty()) hash = h;
        if (h != hash || (!run.opt.configPath.empty() && h != ownHash)) {
            throw lsavg::Error("report: refusing to aggregate " + f.filename().string() + " (config hash " + h +
                        " differs from " + (run.opt.configPath.empty() ? hash : ownHash) + ")");
        }
        runs.push_back({{"manifest", f.filename().string()},
                        {"subcommand", m.at("subcommand")},
                        {"exit_code", m.at("exit_code")},
                        {"artifacts", m.at("artifacts")},
                        {"summary", m.at("summary")}});
    }
    run.summary["runs"] = runs;
    return Ok;
}

}  // namespace

int run(const Options& options, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const auto& subs = subcommands();
    if (std::find(subs.begin(), subs.end(), options.subcommand) == subs.end()) {
        err << "unknown subcommand " << options.subcommand << '\n';
        return Error;
    }
    Config cfg;
    int code = Error;
    std::optional<Run> r;
    try {
        if (!options.configPath.empty()) cfg = Config::load(options.configPath);
        else if (options.subcommand != "report") throw InvalidArgument("--config is required");
        cfg.check_schema();
        fs::create_directories(options.outDir);
        r.emplace(Run{options, cfg, out, json::object(), {}});
        const std::string hash = config_hash(cfg, options.seed);
        const std::string& s = options.subcommand;
        if (s == "rasterize") code = do_rasterize(*r);
        else if (s == "solve") code = do_solve(*r);
        else if (s == "integrate") code = do_integrate(*r);
        else if (s == "sweep") code = do_sweep(*r);
        else if (s == "scan") code = do_scan(*r);
        else if (s == "poincare") code = do_poincare(*r);
        else if (s == "tubes") code = do_tubes(*r);
        else if (s == "whitney") code = do_whitney(*r);
        else if (s == "union") code = do_union(*r);
        else code = do_report(*r, hash);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Error;
    }

    json artifacts = json::array();
    for (const auto& name : r->artifacts) {
        std::ifstream in(r->path(name), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        std::ostringstream hx;
        hx << std::hex << std::setw(16) << std::setfill('0') << fnv1a(ss.str());
        artifacts.push_back({{"file", name}, {"bytes", ss.str().size()}, {"fnv1a", hx.str()}});
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest;
    manifest["subcommand"] = options.subcommand;
    manifest["version"] = kVersion;
    manifest["config_hash"] = config_hash(cfg, options.seed);
    manifest["seed"] = options.seed;
    manifest["threads"] = options.threads;
    manifest["tol"] = options.tol;
    manifest["wall_time_s"] = wall;
    manifest["exit_code"] = code;
    manifest["config"] = cfg.values();
    manifest["artifacts"] = artifacts;
    manifest["summary"] = r->summary;
    std::ofstream mf(fs::path(options.outDir) / (options.subcommand + ".manifest.json"));
    mf << manifest.dump(2) << '\n';
    if (!mf) {
        err << "error: cannot write manifest\n";
        return Error;
    }
    return code;
}

}  // namespace lsavg::cli
