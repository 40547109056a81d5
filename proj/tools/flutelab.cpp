// flutelab command-line front end: build flute-surface truncations from a
// config file, run the verification suites, compute Busemann limits, scan
// for horocycle-return candidates, profile injectivity radii along the
// vertical ray, and render the construction as SVG.
//
// Exit codes: 0 pass, 1 config error, 2 verification failure, 3 I/O error.
// The environment variable FLUTELAB_THREADS caps worker threads.

#include <algorithm>
#include <array>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flutelab/orbits.hpp"

using json = nlohmann::ordered_json;
using namespace flutelab;

namespace {

struct IoFailure : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Configuration

enum class SurfaceKind { Untwisted, TwistedDelta };

struct ExperimentConfig {
    SurfaceKind kind = SurfaceKind::Untwisted;
    int N = 8;
    double delta = 3.0;                      // twisted-delta family parameter
    std::string schedule = "supergeometric"; // untwisted xi growth law
    double xiBase = 4.0;
    double epsBase = 4.0;

    int scanWordRadius = 3;
    double scanBoundaryWindow = 100.0;
    double scanClusterEpsilon = 0.05;

    double profileTMax = 20.0;
    int profileSteps = 64;
    int profileWordRadius = 2;

    std::string jsonPath;  // empty = stdout
    std::string svgPath;   // empty = stdout (render only)
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& value, const std::string& what,
                    int line, int col) {
    try {
        std::size_t idx = 0;
        const double d = std::stod(value, &idx);
        if (idx == value.size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid number for " + what + ": '" + value + "'",
                      line, col);
}

int parse_integer(const std::string& value, const std::string& what, int line,
                  int col) {
    try {
        std::size_t idx = 0;
        const long long v = std::stoll(value, &idx);
        if (idx == value.size() && v >= INT_MIN && v <= INT_MAX)
            return static_cast<int>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid integer for " + what + ": '" + value + "'",
                      line, col);
}

// Assigns one "section.key = value" setting with immediate validation.
// line/col point at the key (0 when the setting came from --set).
void apply_setting(ExperimentConfig& cfg, const std::string& section,
                   const std::string& key, const std::string& value, int line,
                   int col) {
    const std::string what = section + "." + key;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(msg, line, col);
    };

    if (section == "surface") {
        if (key == "kind") {
            if (value == "untwisted")
                cfg.kind = SurfaceKind::Untwisted;
            else if (value == "twisted-delta")
                cfg.kind = SurfaceKind::TwistedDelta;
            else
                fail("surface.kind must be 'untwisted' or 'twisted-delta', "
                     "got '" + value + "'");
        } else if (key == "N") {
            cfg.N = parse_integer(value, what, line, col);
            if (cfg.N < 0) fail("surface.N must be >= 0");
        } else if (key == "delta") {
            cfg.delta = parse_number(value, what, line, col);
            if (!(cfg.delta > 1.0))
                fail("surface.delta must satisfy delta > 1, got " + value);
        } else if (key == "schedule") {
            if (value != "supergeometric" && value != "geometric")
                fail("surface.schedule must be 'supergeometric' or "
                     "'geometric', got '" + value + "'");
            cfg.schedule = value;
        } else if (key == "xiBase") {
            cfg.xiBase = parse_number(value, what, line, col);
            if (!(cfg.xiBase > 1.0)) fail("surface.xiBase must be > 1");
        } else if (key == "epsBase") {
            cfg.epsBase = parse_number(value, what, line, col);
            if (!(cfg.epsBase > 1.0)) fail("surface.epsBase must be > 1");
        } else {
            fail("unknown key '" + key + "' in [surface]");
        }
        return;
    }
    if (section == "scan") {
        if (key == "wordRadius") {
            cfg.scanWordRadius = parse_integer(value, what, line, col);
            if (cfg.scanWordRadius < 1) fail("scan.wordRadius must be >= 1");
        } else if (key == "boundaryWindow") {
            cfg.scanBoundaryWindow = parse_number(value, what, line, col);
            if (!(cfg.scanBoundaryWindow > 0.0))
                fail("scan.boundaryWindow must be > 0");
        } else if (key == "clusterEpsilon") {
            cfg.scanClusterEpsilon = parse_number(value, what, line, col);
            if (!(cfg.scanClusterEpsilon > 0.0))
                fail("scan.clusterEpsilon must be > 0");
        } else {
            fail("unknown key '" + key + "' in [scan]");
        }
        return;
    }
    if (section == "profile") {
        if (key == "tMax") {
            cfg.profileTMax = parse_number(value, what, line, col);
            if (!(cfg.profileTMax > 0.0)) fail("profile.tMax must be > 0");
        } else if (key == "steps") {
            cfg.profileSteps = parse_integer(value, what, line, col);
            if (cfg.profileSteps < 2) fail("profile.steps must be >= 2");
        } else if (key == "wordRadius") {
            cfg.profileWordRadius = parse_integer(value, what, line, col);
            if (cfg.profileWordRadius < 1)
                fail("profile.wordRadius must be >= 1");
        } else {
            fail("unknown key '" + key + "' in [profile]");
        }
        return;
    }
    if (section == "output") {
        if (key == "jsonPath")
            cfg.jsonPath = value;
        else if (key == "svgPath")
            cfg.svgPath = value;
        else
            fail("unknown key '" + key + "' in [output]");
        return;
    }
    fail("unknown section [" + section + "]");
}

// Flat "key = value" lines under bracketed [section] headers; '#' starts a
// comment anywhere; grammar documented in docs/config.md.
ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file: " + path);

    ExperimentConfig cfg;
    std::string section;
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const std::size_t hash = raw.find('#');
        const std::string body =
            (hash == std::string::npos) ? raw : raw.substr(0, hash);
        std::size_t first = 0;
        while (first < body.size() &&
               std::isspace(static_cast<unsigned char>(body[first])))
            ++first;
        if (first == body.size()) continue;  // blank / comment-only line
        const int col = static_cast<int>(first) + 1;

        if (body[first] == '[') {
            const std::size_t close = body.find(']', first);
            if (close == std::string::npos)
                throw ConfigError("missing ']' in section header", lineNo,
                                  col);
            if (!trim(body.substr(close + 1)).empty())
                throw ConfigError("unexpected text after section header",
                                  lineNo, static_cast<int>(close) + 2);
            section = trim(body.substr(first + 1, close - first - 1));
            if (section != "surface" && section != "scan" &&
                section != "profile" && section != "output")
                throw ConfigError("unknown section [" + section + "]", lineNo,
                                  col);
            continue;
        }

        const std::size_t eq = body.find('=', first);
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineNo, col);
        const std::string key = trim(body.substr(first, eq - first));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key before '='", lineNo, col);
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any "
                              "[section] header", lineNo, col);
        apply_setting(cfg, section, key, value, lineNo, col);
    }
    return cfg;
}

// --set surface.delta=5 style override on top of the parsed config.
void apply_override(ExperimentConfig& cfg, const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects section.key=value, got '" + kv +
                          "'");
    const std::string path = trim(kv.substr(0, eq));
    const std::string value = trim(kv.substr(eq + 1));
    const std::size_t dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ConfigError("--set path must be section.key, got '" + path +
                          "'");
    apply_setting(cfg, path.substr(0, dot), path.substr(dot + 1), value, 0,
                  0);
}

// ---------------------------------------------------------------------------
// Shared pieces

const PlanePoint kBase(0.0, 1.0);

GroupTruncation build_group(const ExperimentConfig& cfg) {
    if (cfg.kind == SurfaceKind::TwistedDelta)
        return build_twisted_delta({cfg.delta, cfg.N, true});
    UntwistedFluteParams params;
    params.N = cfg.N;
    const double xiBase = cfg.xiBase;
    const double epsBase = cfg.epsBase;
    if (cfg.schedule == "geometric")
        params.xi = [xiBase](int n) { return std::pow(xiBase, double(n)); };
    else
        params.xi = [xiBase](int n) {
            return std::pow(xiBase, 0.5 * double(n) * double(n + 3));
        };
    params.eps = [epsBase](int n) { return std::pow(epsBase, -double(n)); };
    return build_untwisted(params);
}

json surface_json(const ExperimentConfig& cfg) {
    json s;
    s["kind"] = (cfg.kind == SurfaceKind::TwistedDelta) ? "twisted-delta"
                                                        : "untwisted";
    s["N"] = cfg.N;
    if (cfg.kind == SurfaceKind::TwistedDelta) {
        s["delta"] = cfg.delta;
    } else {
        s["schedule"] = cfg.schedule;
        s["xiBase"] = cfg.xiBase;
        s["epsBase"] = cfg.epsBase;
    }
    return s;
}

json violation_json(const SchottkyViolation& v) {
    json e;
    e["type"] = "schottky-violation";
    e["circleA"] = v.circle_a;
    e["circleB"] = v.circle_b;
    e["margin"] = v.margin;
    e["message"] = v.what();
    return e;
}

json length_or_null(const MoebiusTransform& m) {
    try {
        return translation_length(m);
    } catch (const Error&) {
        return nullptr;
    }
}

json schottky_json(const SchottkyReport& rep, bool includePairs) {
    json s;
    s["family"] = (rep.family == CircleFamily::Bisector) ? "bisector"
                                                         : "isometric";
    s["pass"] = rep.pass;
    s["circleCount"] = rep.circles.size();
    s["minMargin"] = rep.minMargin;  // +inf serializes as null (no pairs)
    s["minPair"] = json::array({rep.minPairA, rep.minPairB});
    if (includePairs) {
        json circles = json::array();
        for (const LabeledCircle& c : rep.circles) {
            circles.push_back({{"label", c.label},
                               {"center", c.circle.center},
                               {"radius", c.circle.radius}});
        }
        s["circles"] = circles;
        json pairs = json::array();
        for (const PairMargin& p : rep.pairs)
            pairs.push_back({{"a", p.a}, {"b", p.b}, {"margin", p.margin}});
        s["pairs"] = pairs;
    }
    return s;
}

json diagnostic_json(const CoefficientDiagnostic& d) {
    json j;
    j["bestCase"] = d.bestCase;
    j["residuals"] = json::array(
        {d.residualCase1, d.residualCase2, d.residualCase3});
    j["alphaSq"] = d.alphaSq;
    j["divergent"] = d.divergent;
    return j;
}

json scan_report_json(const ScanReport& rep) {
    json j;
    j["wordRadius"] = rep.wordRadius;
    j["alphaWordRadius"] = rep.alphaWordRadius;
    j["boundaryWindow"] = rep.boundaryWindow;
    j["clusterEpsilon"] = rep.clusterEpsilon;
    j["minWitnesses"] = rep.minWitnesses;
    j["wordsVisited"] = rep.wordsVisited;
    j["wordsKept"] = rep.wordsKept;
    json cands = json::array();
    for (const ScanCandidate& c : rep.candidates) {
        json jc;
        jc["t"] = c.t;
        jc["spread"] = c.spread;
        jc["witnessCount"] = c.witnesses.size();
        json ws = json::array();
        for (const ScanWitness& w : c.witnesses) {
            ws.push_back({{"word", w.word.to_string()},
                          {"alphaWord", w.alphaWord.to_string()},
                          {"B", w.B},
                          {"boundary", w.boundary}});
        }
        jc["witnesses"] = ws;
        jc["diagnostics"] = diagnostic_json(c.diag);
        cands.push_back(std::move(jc));
    }
    j["candidates"] = cands;
    j["additivityNotes"] = rep.additivityNotes;
    j["caveat"] = rep.caveat;
    return j;
}

void emit_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoFailure("write to stdout failed");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open output file: " + path);
    out << text;
    out.flush();
    if (!out) throw IoFailure("write failed: " + path);
}

void emit_json(const json& rep, const std::string& path) {
    emit_text(rep.dump(2) + "\n", path);
}

// ---------------------------------------------------------------------------
// Commands

int cmd_build(const ExperimentConfig& cfg) {
    json rep;
    rep["command"] = "build";
    rep["surface"] = surface_json(cfg);

    GroupTruncation g;
    try {
        g = build_group(cfg);
    } catch (const SchottkyViolation& v) {
        rep["error"] = violation_json(v);
        emit_json(rep, cfg.jsonPath);
        std::cerr << "schottky violation: " << v.what() << "\n";
        return 2;
    }

    if (g.is_untwisted()) {
        json rows = json::array();
        for (const ConstructionStep& s : g.trace()) {
            json r;
            r["n"] = s.n;
            r["xi"] = s.xi;
            r["eps"] = s.eps;
            r["p"] = {{"x", s.Y}, {"y", s.I}};
            r["X"] = s.X;
            r["R"] = s.R;
            r["Xp"] = s.Xp;
            r["K"] = s.K;
            r["trace"] = s.mpTrace;
            r["length"] = length_or_null(s.f);
            rows.push_back(std::move(r));
        }
        rep["steps"] = rows;
        rep["traceBoundIndex"] = g.trace_bound_index();
    } else {
        const TwistedProvenance& prov = g.twisted();
        rep["delta"] = prov.delta;
        rep["p"] = prov.p;
        json rows = json::array();
        for (std::size_t k = 0; k < g.generators.size(); ++k) {
            json r;
            r["n"] = g.labels[k];
            r["p"] = prov.p[k];
            try {
                const auto u = g.generators[k].unit_det_coeffs();
                r["coeffs"] = json::array({u[0], u[1], u[2], u[3]});
                r["trace"] = std::abs(u[0] + u[3]);
            } catch (const Error&) {
                r["coeffs"] = nullptr;
                r["trace"] = nullptr;
            }
            r["length"] = length_or_null(g.generators[k]);
            rows.push_back(std::move(r));
        }
        rep["letters"] = rows;
    }

    const SchottkyReport sch = check_schottky(g, kBase);
    rep["schottky"] = schottky_json(sch, true);
    emit_json(rep, cfg.jsonPath);
    if (!sch.pass)
        std::cerr << "schottky check failed: min margin " << sch.minMargin
                  << " at " << sch.minPairA << " vs " << sch.minPairB << "\n";
    return sch.pass ? 0 : 2;
}

int cmd_verify(const ExperimentConfig& cfg) {
    json rep;
    rep["command"] = "verify";
    rep["surface"] = surface_json(cfg);

    GroupTruncation g;
    try {
        g = build_group(cfg);
    } catch (const SchottkyViolation& v) {
        rep["error"] = violation_json(v);
        emit_json(rep, cfg.jsonPath);
        std::cerr << "schottky violation: " << v.what() << "\n";
        return 2;
    }

    json checks = json::array();
    bool allPass = true;
    auto add = [&](const std::string& name, bool pass, json detail,
                   bool informational = false) {
        json c;
        c["name"] = name;
        c["pass"] = pass;
        c["informational"] = informational;
        c["detail"] = std::move(detail);
        checks.push_back(std::move(c));
        if (!informational && !pass) allPass = false;
    };

    const std::size_t count = g.generators.size();
    if (count == 0)
        rep["warning"] = "empty truncation (N = 0): all checks are vacuous";

    const SchottkyReport sch = check_schottky(g, kBase);
    add("schottky-disjointness", sch.pass, schottky_json(sch, false));

    const NestednessReport nest = check_nested(g);
    add("axis-nesting", nest.pass,
        json{{"axisCount", nest.axes.size()},
             {"pairCount", nest.pairs.size()}});

    double detResidual = 0.0;
    bool detOk = true;
    bool allHyperbolic = true;
    for (const MoebiusTransform& m : g.generators) {
        try {
            const auto u = m.unit_det_coeffs();
            detResidual = std::max(
                detResidual, std::abs(det2(u[0], u[1], u[2], u[3]) - 1.0));
        } catch (const Error&) {
            // normalized storage keeps det = 1 even when the plain
            // coefficients exceed double range; nothing to measure here
        }
        if (classify(m) != IsometryClass::Hyperbolic) allHyperbolic = false;
    }
    if (!(detResidual <= 1e-12)) detOk = false;
    add("unit-determinant", detOk, json{{"maxResidual", detResidual}});
    add("hyperbolic-generators", allHyperbolic,
        json{{"generatorCount", count}});

    if (count > 0) {
        const Geodesic tildeA(BoundaryPoint(-1.0), BoundaryPoint(1.0));
        const UntwistedCheckReport ut = check_untwisted(g, tildeA);
        json detail{{"relationCase", ut.relationCase},
                    {"maxResidual", ut.maxResidual}};
        if (g.is_untwisted()) {
            add("common-orthogonal", ut.pass, detail);
        } else {
            detail["note"] =
                "twisted family: failing the common-orthogonal relation "
                "against (-1, 1) is the expected outcome";
            add("common-orthogonal", ut.pass, detail, true);
        }
    }

    if (g.is_untwisted() && count > 0) {
        const ConstructionTrace& steps = g.trace();

        double worstInverse = 0.0;
        double worstLevel = 0.0;
        double worstAxisProduct = 0.0;
        bool decreasing = true;
        double prevImage = std::numeric_limits<double>::infinity();
        for (const ConstructionStep& s : steps) {
            const PlanePoint q = apply(invert(s.f), kBase);
            worstInverse = std::max(
                worstInverse,
                std::abs(q.x - s.p.x) / std::max(1.0, std::abs(s.p.x)));
            worstInverse = std::max(
                worstInverse,
                std::abs(q.y - s.p.y) / std::max(1.0, std::abs(s.p.y)));
            worstLevel = std::max(
                worstLevel,
                std::abs(busemann(BoundaryPoint::infinity(), s.p, kBase) -
                         s.eps));
            const auto fixed = fixed_points(s.f);
            worstAxisProduct = std::max(
                worstAxisProduct,
                std::abs(fixed.first.value() * fixed.second.value() - 1.0));
            const double image = s.f(BoundaryPoint::infinity()).value();
            if (!(image < prevImage)) decreasing = false;
            prevImage = image;
        }
        add("inverse-orbit-point", worstInverse <= 1e-10,
            json{{"maxRelResidual", worstInverse}});
        add("busemann-level", worstLevel <= 1e-12,
            json{{"maxResidual", worstLevel}});
        add("axis-endpoint-product", worstAxisProduct <= 1e-9,
            json{{"maxResidual", worstAxisProduct}});
        const int boundIndex = g.trace_bound_index();
        add("trace-bound", boundIndex <= cfg.N,
            json{{"index", boundIndex}, {"threshold", 5.0}});
        add("boundary-images-decreasing", decreasing,
            json{{"first", steps.front().f(BoundaryPoint::infinity()).value()},
                 {"last", steps.back().f(BoundaryPoint::infinity()).value()}});
    }

    rep["checks"] = checks;
    rep["pass"] = allPass;
    emit_json(rep, cfg.jsonPath);
    if (!allPass) std::cerr << "verification failed\n";
    return allPass ? 0 : 2;
}

int cmd_limits(const ExperimentConfig& cfg, int kMax, int nMax) {
    if (kMax < 0) throw ConfigError("--kmax must be >= 0");
    if (nMax < 1) throw ConfigError("--nmax must be >= 1");
    json rep;
    rep["command"] = "limits";
    rep["delta"] = cfg.delta;
    rep["nMax"] = nMax;
    json rows = json::array();
    for (int k = 0; k <= kMax; ++k) {
        const WordLimitSeries series =
            busemann_along_words(k, cfg.delta, 1, nMax);
        rows.push_back({{"k", k},
                        {"tail", series.tail},
                        {"target", series.target},
                        {"absError", series.absError},
                        {"nonConvergent", series.nonConvergent}});
    }
    rep["rows"] = rows;
    emit_json(rep, cfg.jsonPath);
    return 0;
}

int cmd_scan(const ExperimentConfig& cfg) {
    json rep;
    rep["command"] = "scan";
    rep["surface"] = surface_json(cfg);

    GroupTruncation g;
    try {
        g = build_group(cfg);
    } catch (const SchottkyViolation& v) {
        rep["error"] = violation_json(v);
        emit_json(rep, cfg.jsonPath);
        std::cerr << "schottky violation: " << v.what() << "\n";
        return 2;
    }

    const UnitTangent up(kBase, BoundaryPoint::infinity());
    if (cfg.kind == SurfaceKind::Untwisted) {
        const ScanSweep sweep =
            tu_scan_sweep(up, g, cfg.scanWordRadius, cfg.scanBoundaryWindow,
                          cfg.scanClusterEpsilon);
        rep["windows"] = sweep.windows;
        json reports = json::array();
        for (const ScanReport& r : sweep.reports)
            reports.push_back(scan_report_json(r));
        rep["reports"] = reports;
        rep["stableCandidates"] = sweep.stableCandidates;
        rep["caveat"] = sweep.caveat;
    } else {
        const PowerTowerScanReport pt = tu_scan_power_tower(
            cfg.delta, 20, 3, cfg.scanBoundaryWindow, cfg.scanClusterEpsilon);
        json j;
        j["nMax"] = pt.nMax;
        j["kMax"] = pt.kMax;
        j["boundaryWindow"] = pt.boundaryWindow;
        j["clusterEpsilon"] = pt.clusterEpsilon;
        j["minWitnesses"] = pt.minWitnesses;
        json cands = json::array();
        for (const PowerTowerCandidate& c : pt.candidates) {
            json jc;
            jc["t"] = c.t;
            jc["spread"] = c.spread;
            jc["witnessCount"] = c.witnesses.size();
            json ws = json::array();
            for (const PowerTowerWitness& w : c.witnesses)
                ws.push_back({{"n", w.n},
                              {"k", w.k},
                              {"B", w.B},
                              {"boundary", w.boundary}});
            jc["witnesses"] = ws;
            jc["diagnostics"] = diagnostic_json(c.diag);
            cands.push_back(std::move(jc));
        }
        j["candidates"] = cands;
        j["additivityNotes"] = pt.additivityNotes;
        j["caveat"] = pt.caveat;
        rep["report"] = j;
    }
    emit_json(rep, cfg.jsonPath);
    return 0;
}

int cmd_profile(const ExperimentConfig& cfg) {
    json rep;
    rep["command"] = "profile";
    rep["surface"] = surface_json(cfg);

    GroupTruncation g;
    try {
        g = build_group(cfg);
    } catch (const SchottkyViolation& v) {
        rep["error"] = violation_json(v);
        emit_json(rep, cfg.jsonPath);
        std::cerr << "schottky violation: " << v.what() << "\n";
        return 2;
    }

    const UnitTangent up(kBase, BoundaryPoint::infinity());
    const RayProfile profile =
        thinness_profile(up, g, cfg.profileTMax, cfg.profileSteps,
                         cfg.profileWordRadius);
    const QuasiMinimizingReport qm =
        quasi_minimizing_constant(up, g, cfg.profileTMax, cfg.profileSteps,
                                  cfg.profileWordRadius);

    rep["times"] = profile.times;
    rep["inj"] = profile.inj;
    rep["runningMinTail"] = profile.runningMinTail;
    rep["liminfProxy"] = profile.liminfProxy;
    rep["wordRadius"] = profile.wordRadius;
    rep["genCount"] = profile.genCount;
    rep["quasiMinimizing"] = {{"c", qm.c},
                              {"tailSlope", qm.tailSlope},
                              {"flagged", qm.flagged},
                              {"tMax", qm.tMax},
                              {"steps", qm.steps}};
    emit_json(rep, cfg.jsonPath);
    return 0;
}

// ---------------------------------------------------------------------------
// SVG rendering

std::string fmt(double v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// World coordinates: upper half-plane, real axis at y = 0.  SVG y is the
// negated world y, so the viewBox spans [-top, 0] vertically and the
// viewport bottom edge clips every circle to its upper half.
int cmd_render(const ExperimentConfig& cfg) {
    GroupTruncation g;
    try {
        g = build_group(cfg);
    } catch (const SchottkyViolation& v) {
        std::cerr << "schottky violation: " << v.what() << "\n";
        return 2;
    }

    const SchottkyReport sch = check_schottky(g, kBase);
    const NestednessReport nest = check_nested(g);

    double xLo = -1.2, xHi = 1.2, top = 1.3;
    for (const LabeledCircle& c : sch.circles) {
        xLo = std::min(xLo, c.circle.center - c.circle.radius);
        xHi = std::max(xHi, c.circle.center + c.circle.radius);
        top = std::max(top, c.circle.radius);
    }
    for (const AxisInterval& a : nest.axes) {
        if (std::isfinite(a.lo)) xLo = std::min(xLo, a.lo);
        if (std::isfinite(a.hi)) {
            xHi = std::max(xHi, a.hi);
            if (std::isfinite(a.lo))
                top = std::max(top, 0.5 * (a.hi - a.lo));
        }
    }
    const double margin = 0.1 * (xHi - xLo);
    xLo -= margin;
    xHi += margin;
    top *= 1.1;
    const double width = xHi - xLo;
    const double fontSize = 0.03 * top;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" "
           "height=\"700\" viewBox=\"" +
           fmt(xLo) + " " + fmt(-top) + " " + fmt(width) + " " + fmt(top) +
           "\" preserveAspectRatio=\"xMidYMid meet\">\n";
    svg += "<rect x=\"" + fmt(xLo) + "\" y=\"" + fmt(-top) + "\" width=\"" +
           fmt(width) + "\" height=\"" + fmt(top) +
           "\" fill=\"#ffffff\"/>\n";

    auto stroke_attrs = [](const std::string& color, bool dashed) {
        std::string s = " fill=\"none\" stroke=\"" + color +
                        "\" stroke-width=\"1.5\" "
                        "vector-effect=\"non-scaling-stroke\"";
        if (dashed) s += " stroke-dasharray=\"6 4\"";
        return s;
    };
    auto line = [&](double x1, double y1, double x2, double y2,
                    const std::string& color, bool dashed) {
        svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(-y1) + "\" x2=\"" +
               fmt(x2) + "\" y2=\"" + fmt(-y2) + "\"" +
               stroke_attrs(color, dashed) + "/>\n";
    };
    auto circle = [&](double cx, double cy, double r,
                      const std::string& color, bool dashed) {
        svg += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(-cy) + "\" r=\"" +
               fmt(r) + "\"" + stroke_attrs(color, dashed) + "/>\n";
    };

    // Real axis and the reference geodesic A~ = (-1, 1).
    line(xLo, 0.0, xHi, 0.0, "#444444", false);
    circle(0.0, 0.0, 1.0, "#9467bd", false);

    // Bisector / isometric circles: C_n blue, C'_n red.
    for (const LabeledCircle& c : sch.circles) {
        const bool primed = c.label.find('\'') != std::string::npos;
        circle(c.circle.center, 0.0, c.circle.radius,
               primed ? "#d62728" : "#1f77b4", false);
    }

    // Generator axes, dashed green.
    for (const AxisInterval& a : nest.axes) {
        if (!std::isfinite(a.hi)) {
            line(a.lo, 0.0, a.lo, top, "#2ca02c", true);
        } else if (a.hi > a.lo) {
            circle(0.5 * (a.lo + a.hi), 0.0, 0.5 * (a.hi - a.lo), "#2ca02c",
                   true);
        }
    }

    // Horocycle Im = 1 and its image under inversion in the unit circle.
    line(xLo, 1.0, xHi, 1.0, "#8c564b", true);
    circle(0.0, 0.5, 0.5, "#8c564b", true);

    // The vertical ray from i toward infinity.
    line(0.0, 1.0, 0.0, top, "#ff7f0e", false);

    // Circle labels above each circle top.
    for (const LabeledCircle& c : sch.circles) {
        svg += "<text x=\"" + fmt(c.circle.center) + "\" y=\"" +
               fmt(-(c.circle.radius + 0.015 * top)) +
               "\" text-anchor=\"middle\" font-family=\"monospace\" "
               "font-size=\"" +
               fmt(fontSize) + "\" fill=\"#333333\">" + c.label +
               "</text>\n";
    }

    svg += "</svg>\n";
    emit_text(svg, cfg.svgPath);
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{
        "flutelab: build flute-surface truncations, verify their Schottky "
        "and coefficient identities, compute Busemann limits, scan for "
        "horocycle-return candidates, profile injectivity radii, and render "
        "SVG figures.  FLUTELAB_THREADS caps worker threads."};
    app.require_subcommand(1);

    std::string configPath;
    std::vector<std::string> overrides;
    int kMax = 3;
    int nMax = 20;

    CLI::App* build = app.add_subcommand(
        "build", "construct the surface and report the trace tables");
    CLI::App* verify = app.add_subcommand(
        "verify", "run the verification checks on the built truncation");
    CLI::App* limits = app.add_subcommand(
        "limits", "Busemann levels along power-tower words vs. their targets");
    CLI::App* scan = app.add_subcommand(
        "scan", "scan for horocycle-return time candidates");
    CLI::App* profile = app.add_subcommand(
        "profile", "injectivity-radius profile along the vertical ray");
    CLI::App* render =
        app.add_subcommand("render", "draw the construction as SVG");

    for (CLI::App* sub :
         {build, verify, limits, scan, profile, render}) {
        sub->add_option("--config", configPath,
                        "config file ([section] headers, key = value lines)");
        sub->add_option("--set", overrides,
                        "override a setting, e.g. --set surface.delta=5");
    }
    limits->add_option("--kmax", kMax, "largest tower height (default 3)");
    limits->add_option("--nmax", nMax, "largest base index (default 20)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig cfg;
        if (!configPath.empty()) cfg = parse_config_file(configPath);
        for (const std::string& kv : overrides) apply_override(cfg, kv);

        if (app.got_subcommand(build)) return cmd_build(cfg);
        if (app.got_subcommand(verify)) return cmd_verify(cfg);
        if (app.got_subcommand(limits)) return cmd_limits(cfg, kMax, nMax);
        if (app.got_subcommand(scan)) return cmd_scan(cfg);
        if (app.got_subcommand(profile)) return cmd_profile(cfg);
        if (app.got_subcommand(render)) return cmd_render(cfg);
        std::cerr << "no command selected\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " at line " << e.line;
        if (e.column > 0) std::cerr << ", column " << e.column;
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const IoFailure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const SchottkyViolation& e) {
        std::cerr << "schottky violation: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
