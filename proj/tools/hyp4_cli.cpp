#include "hyp4/spec_io.hpp"
#include "hyp4/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace hyp4;

namespace {

constexpr int kExitPass = 0, kExitViolation = 1, kExitConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Inline JSON, or @path to read it from a file.
json load_spec(const std::string& arg) {
    return parse_json_text(!arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg);
}

Point4 parse_center(const std::string& s) {
    std::string t = s;
    for (char& c : t)
        if (c == ',' || c == '[' || c == ']') c = ' ';
    std::istringstream in(t);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof() || v.size() != 4) throw SpecError("center must be four numbers x1,x2,x3,x4");
    return Point4(v[0], v[1], v[2], v[3]);
}

bounds::Exp3Reading parse_exp3(const std::string& s) {
    if (s == "triple_arg") return bounds::Exp3Reading::triple_arg;
    if (s == "triple_compose") return bounds::Exp3Reading::triple_compose;
    throw ConfigError("exp3 reading must be triple_arg or triple_compose");
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

json bound_json(const bounds::BoundValue& b) {
    json in = json::object();
    for (const auto& [k, v] : b.inputs) in[k] = v;
    json j = {{"formula_id", b.formula_id}, {"inputs", in}};
    j["value"] = b.log_value > std::log(1e300) ? json(nullptr) : json(b.value);
    j["log_value"] = b.log_value;
    return j;
}

using Inputs = std::map<std::string, double>;

double need(const Inputs& in, const std::string& k) {
    auto it = in.find(k);
    if (it == in.end()) throw ConfigError("missing input " + k);
    return it->second;
}

int genus(const Inputs& in, const std::string& k) {
    double v = need(in, k);
    if (v != std::floor(v)) throw ConfigError(k + " must be an integer");
    return static_cast<int>(v);
}

const std::map<std::string, std::function<bounds::BoundValue(const Inputs&)>>& formula_table() {
    using namespace bounds;
    static const std::map<std::string, std::function<BoundValue(const Inputs&)>> t = {
        {"curve_bound_K", [](const Inputs& i) { return curve_bound_K(need(i, "l1"), need(i, "l2")); }},
        {"lemma1_count_bound", [](const Inputs& i) { return lemma1_count_bound(need(i, "r"), need(i, "nu")); }},
        {"lemma2_count_bound", [](const Inputs& i) { return lemma2_count_bound(need(i, "r"), need(i, "nu")); }},
        {"n_lemma3",
         [](const Inputs& i) {
             double r = need(i, "r"), nu = need(i, "nu");
             require_positive(r, "r");
             require_positive(nu, "nu");
             return make("n_lemma3", {{"r", r}, {"nu", nu}}, log_n_lemma3(r, nu));
         }},
        {"C1", [](const Inputs& i) { return C1(need(i, "r"), need(i, "nu")); }},
        {"k_lemma5", [](const Inputs& i) { return k_lemma5(need(i, "R"), need(i, "nu")); }},
        {"C_plus", [](const Inputs& i) { return C_plus(need(i, "R"), need(i, "mu")); }},
        {"C_minus", [](const Inputs& i) { return C_minus(need(i, "R"), need(i, "mu")); }},
        {"N_theorem4", [](const Inputs& i) { return N_theorem4(need(i, "C"), need(i, "nu")); }},
        {"Nprime_theorem5", [](const Inputs& i) { return Nprime_theorem5(need(i, "C"), need(i, "nu")); }},
        {"C2", [](const Inputs& i) { return C2(need(i, "mu"), genus(i, "g")); }},
        {"C3", [](const Inputs& i) { return C3(need(i, "mu"), genus(i, "g")); }},
        {"C4", [](const Inputs& i) { return C4(need(i, "mu"), genus(i, "g"), need(i, "nu")); }},
        {"C5", [](const Inputs& i) { return C5(need(i, "mu"), genus(i, "g"), need(i, "nu")); }},
        {"triangulation_edge_6", [](const Inputs& i) { return triangulation_edge_6(need(i, "mu"), genus(i, "g")); }},
        {"triangulation_edge_16", [](const Inputs& i) { return triangulation_edge_16(need(i, "mu"), genus(i, "g")); }},
        {"count_short_short", [](const Inputs& i) { return count_short_short(need(i, "R"), need(i, "mu")); }},
        {"count_short_long", [](const Inputs& i) { return count_short_long(need(i, "C5"), need(i, "nu")); }},
        {"count_long_long",
         [](const Inputs& i) { return count_long_long(genus(i, "g"), need(i, "C5"), need(i, "nu")); }},
        {"count_film_triangle", [](const Inputs& i) { return count_film_triangle(need(i, "C5"), need(i, "nu")); }},
        {"count_tube_annuli", [](const Inputs& i) { return count_tube_annuli(need(i, "R"), need(i, "nu")); }},
        {"final_intersection_bound",
         [](const Inputs& i) { return final_intersection_bound(genus(i, "g"), need(i, "mu")); }},
        {"link_count_bound",
         [](const Inputs& i) { return link_count_bound(genus(i, "g1"), genus(i, "g2"), need(i, "mu")); }},
        {"appendix_bound", [](const Inputs& i) { return appendix_bound(need(i, "l1"), need(i, "l2")); }},
    };
    return t;
}

const std::map<std::string, std::function<bool(const Inputs&)>>& predicate_table() {
    static const std::map<std::string, std::function<bool(const Inputs&)>> t = {
        {"sinh_product_test", [](const Inputs& i) { return bounds::sinh_product_test(need(i, "l1"), need(i, "l2")); }},
        {"milnor_wood_test",
         [](const Inputs& i) { return bounds::milnor_wood_test(genus(i, "e"), genus(i, "g")); }},
        {"theorem2_range_test",
         [](const Inputs& i) { return bounds::theorem2_range_test(genus(i, "e"), genus(i, "g")); }},
    };
    return t;
}

Inputs parse_inputs(const std::vector<std::string>& kv) {
    Inputs in;
    for (const auto& s : kv) {
        auto pos = s.find('=');
        if (pos == std::string::npos || pos == 0) throw ConfigError("input must be key=value: " + s);
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s.substr(pos + 1), &used);
        } catch (const std::exception&) {
            throw ConfigError("not a number: " + s);
        }
        if (used != s.size() - pos - 1) throw ConfigError("not a number: " + s);
        in[s.substr(0, pos)] = v;
    }
    return in;
}

struct VerifyArgs {
    std::string suite;
    long long trials = 1000;
    std::uint64_t seed = 42;
    double mu = 0.1;
    std::optional<double> nu;
    std::string json_path, timing_path, exp3 = "triple_arg";
    int max_pq = 12;
};

int cmd_verify(const VerifyArgs& a) {
    std::vector<std::string> ids;
    if (a.suite == "all")
        ids = suite_ids();
    else
        ids = {a.suite};
    for (const auto& id : ids)
        if (std::find(suite_ids().begin(), suite_ids().end(), id) == suite_ids().end())
            throw ConfigError("unknown suite: " + id);
    json reports = json::array();
    json timing = json::object();
    bool all_pass = true;
    double total = 0.0;
    for (const auto& id : ids) {
        SuiteConfig cfg;
        cfg.suite_id = id;
        cfg.trials = a.trials;
        cfg.seed = a.seed;
        cfg.mu = a.mu;
        cfg.nu = a.nu;
        cfg.exp3 = parse_exp3(a.exp3);
        cfg.max_pq = a.max_pq;
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        VerificationReport rep = run_suite(cfg);
        all_pass = all_pass && rep.pass();
        total += rep.wall_time;
        timing[id] = rep.wall_time;
        reports.push_back(rep.to_json());
        std::fprintf(a.json_path.empty() ? stderr : stdout,
                     "%-13s %s  trials=%lld violations=%zu worst_margin=%.6g rejected=%lld degeneracies=%lld  (%.2f s)\n",
                     id.c_str(), rep.pass() ? "PASS" : "FAIL", rep.trials, rep.violations.size(), rep.worst_margin,
                     rep.rejected, rep.degeneracies, rep.wall_time);
    }
    timing["total"] = total;
    timing["timestamp"] = timestamp();
    json out = {{"reports", reports}, {"pass", all_pass}};
    if (a.json_path.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        write_text(a.json_path, out.dump(2) + "\n");
        std::string tp = a.timing_path.empty() ? a.json_path + ".timing.json" : a.timing_path;
        write_text(tp, timing.dump(2) + "\n");
    }
    return all_pass ? kExitPass : kExitViolation;
}

int cmd_bounds(const std::string& id, const std::vector<std::string>& kv, const std::string& exp3, bool log_space) {
    Inputs in = parse_inputs(kv);
    bounds::exp3_reading() = parse_exp3(exp3);
    try {
        if (auto p = predicate_table().find(id); p != predicate_table().end()) {
            json jin = json::object();
            for (const auto& [k, v] : in) jin[k] = v;
            std::cout << json{{"formula_id", id}, {"inputs", jin}, {"result", p->second(in)}}.dump(2) << '\n';
            return kExitPass;
        }
        auto f = formula_table().find(id);
        if (f == formula_table().end()) throw ConfigError("unknown formula: " + id);
        auto b = f->second(in);
        if (b.log_value > std::log(1e300) && !log_space)
            throw ConfigError("value exceeds 1e300; rerun with --log-space to get log_value only");
        std::cout << bound_json(b).dump(2) << '\n';
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    return kExitPass;
}

int cmd_orbit(const std::string& spec, const std::string& center, double radius, std::optional<double> nu_opt) {
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    Point4 x = parse_center(center);
    auto gens = parse_generators(load_spec(spec));
    ElementaryGroup G = suites::plain_group(gens);
    double mi = min_index_exact(G, x);
    double nu = nu_opt ? *nu_opt : mi / 2.0;
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    long long count = orbit_count(G, x, radius), overlap = overlap_count(G, x, radius);
    json out = {{"center", to_json(x)},
                {"radius", radius},
                {"injectivity_radius", mi / 2.0},
                {"nu", nu},
                {"hypothesis_holds", mi / 2.0 >= nu},
                {"orbit_count", count},
                {"lemma1_bound", bound_json(bounds::lemma1_count_bound(radius, nu))},
                {"overlap_count", overlap},
                {"lemma2_bound", bound_json(bounds::lemma2_count_bound(radius, nu))}};
    std::cout << out.dump(2) << '\n';
    return kExitPass;
}

int cmd_cone_mesh(const std::string& spec, double nu, int res, double extent, const std::string& out) {
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    auto gens = parse_generators(load_spec(spec));
    if (gens.size() != 1) throw ConfigError("cone-mesh takes a cyclic group");
    std::vector<Point4> corners;
    for (double a : {-extent, extent})
        for (double b : {-extent, extent})
            for (double c : {-extent, extent}) corners.push_back(Point4(a, b, c, 1.0));
    auto K = suites::cone_covering(gens, nu, corners);
    Mesh m = cone_boundary_mesh(K, res, extent);
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write " + out);
    bool csv = out.size() >= 4 && out.substr(out.size() - 4) == ".csv";
    if (csv)
        write_csv(os, m);
    else
        write_obj(os, m);
    double worst = 0.0;
    for (const auto& v : m.vertices) worst = std::max(worst, std::abs(boundary_residual(K, v)));
    std::cout << json{{"vertices", m.vertices.size()}, {"quads", m.quads.size()}, {"max_abs_residual", worst},
                      {"format", csv ? "csv" : "obj"}, {"out", out}}
                     .dump(2)
              << '\n';
    return kExitPass;
}

// {mode: film-plane, film: {...}, plane: [p, q, r]} or {mode: film-film, film1, film2, group}.
int cmd_film_count(const std::string& path, const std::string& csv_path) {
    json spec = parse_json_text(read_file(path));
    std::string mode = spec.value("mode", "");
    json out;
    if (mode == "film-plane") {
        RuledFilm F = parse_film(spec.at("film"));
        const json& pl = spec.at("plane");
        if (!pl.is_array() || pl.size() != 3) throw SpecError("plane must be three points");
        auto P = GeodesicPlane2::through_points(parse_point(pl[0]), parse_point(pl[1]), parse_point(pl[2]));
        auto r = count_film_plane_intersections(F, P);
        auto cert = check_general_position(F);
        json roots = json::array();
        for (const auto& q : r.roots)
            roots.push_back({{"sheet", sheet_name(q.sheet)}, {"s", q.s}, {"t", q.t}, {"point", to_json(q.point)}});
        out = {{"mode", mode}, {"count", r.count}, {"reliable", r.reliable}, {"degeneracies", r.degeneracies},
               {"general_position", cert.certified}, {"roots", roots}};
    } else if (mode == "film-film") {
        RuledFilm F1 = parse_film(spec.at("film1")), F2 = parse_film(spec.at("film2"));
        auto G = suites::plain_group(parse_generators(spec.at("group")));
        auto r = count_film_film_intersections(F1, F2, G);
        json roots = json::array();
        for (const auto& q : r.roots)
            roots.push_back({{"sheet1", sheet_name(q.sheet1)}, {"s", q.s}, {"t", q.t}, {"sheet2", sheet_name(q.sheet2)},
                             {"u", q.u}, {"v", q.v}, {"word", q.word}, {"sign", q.sign}, {"point", to_json(q.point)}});
        out = {{"mode", mode}, {"signed_count", r.signed_count}, {"crossings", r.roots.size()},
               {"translates_tested", r.translates_tested}, {"reliable", r.reliable},
               {"degeneracies", r.degeneracies}, {"roots", roots}};
        if (!csv_path.empty()) {
            std::ofstream os(csv_path);
            if (!os) throw ConfigError("cannot write " + csv_path);
            write_roots_csv(os, r.roots);
        }
    } else {
        throw SpecError("mode must be film-plane or film-film");
    }
    std::cout << out.dump(2) << '\n';
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Upper half-space H^4 toolkit: verification suites, bounds, orbits, cone meshes, film counts"};
    app.require_subcommand(1);

    VerifyArgs va;
    double nu_value = 0.0;
    auto* verify = app.add_subcommand("verify", "Run a verification suite, or all of them");
    verify->add_option("suite", va.suite, "Suite id or 'all'")->required();
    verify->add_option("--trials", va.trials, "Trials per suite");
    verify->add_option("--seed", va.seed, "64-bit seed");
    verify->add_option("--mu", va.mu, "Margulis constant");
    auto* nu_opt = verify->add_option("--nu", nu_value, "Fix nu instead of sampling it");
    verify->add_option("--json", va.json_path, "Write the reports to this file");
    verify->add_option("--timing", va.timing_path, "Timing file (default: <json>.timing.json)");
    verify->add_option("--exp3", va.exp3, "triple_arg or triple_compose");
    verify->add_option("--max-pq", va.max_pq, "Coprime sweep size for the punctured-torus suite");

    std::string formula, exp3 = "triple_arg";
    std::vector<std::string> kv;
    bool log_space = false;
    auto* bnd = app.add_subcommand("bounds", "Evaluate a bound by formula id");
    bnd->add_option("formula_id", formula)->required();
    bnd->add_option("--in", kv, "Inputs as key=value")->expected(0, -1);
    bnd->add_option("--exp3", exp3, "triple_arg or triple_compose");
    bnd->add_flag("--log-space", log_space, "Allow values beyond 1e300 (reported as log_value)");

    std::string group, center;
    double radius = 0.0, orbit_nu = 0.0;
    auto* orbit = app.add_subcommand("orbit", "Count orbit points in a ball and compare with the counting bounds");
    orbit->add_option("--group", group, "Group SPEC (JSON or @file)")->required();
    orbit->add_option("--center", center, "x1,x2,x3,x4")->required();
    orbit->add_option("--radius", radius)->required();
    auto* orbit_nu_opt = orbit->add_option("--nu", orbit_nu, "nu for the bounds (default: injectivity radius)");

    std::string mesh_group, out_path;
    double mesh_nu = 0.0, extent = 2.0;
    int res = 32;
    auto* mesh = app.add_subcommand("cone-mesh", "Sample the cone boundary on one fiber");
    mesh->add_option("--group", mesh_group, "Group SPEC (JSON or @file)")->required();
    mesh->add_option("--nu", mesh_nu)->required();
    mesh->add_option("--res", res, "Grid resolution");
    mesh->add_option("--extent", extent, "Half-width of the parabolic fiber window");
    mesh->add_option("--out", out_path, "Output path, .obj or .csv")->required();

    std::string film_spec, roots_csv;
    auto* film = app.add_subcommand("film-count", "Count film-plane or film-film intersections");
    film->add_option("--spec", film_spec, "JSON spec file")->required();
    film->add_option("--csv", roots_csv, "Write film-film roots as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*verify) {
            if (*nu_opt) va.nu = nu_value;
            return cmd_verify(va);
        }
        if (*bnd) return cmd_bounds(formula, kv, exp3, log_space);
        if (*orbit) return cmd_orbit(group, center, radius, *orbit_nu_opt ? std::optional<double>(orbit_nu) : std::nullopt);
        if (*mesh) return cmd_cone_mesh(mesh_group, mesh_nu, res, extent, out_path);
        if (*film) return cmd_film_count(film_spec, roots_csv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
