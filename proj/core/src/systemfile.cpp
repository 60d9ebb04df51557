#include "lyapcert/systemfile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lyapcert {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw InputError(path + ": " + msg);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) fail(path + "/" + item.key(), "unknown field");
    }
}

const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "/" + key, "required field is missing");
    return *it;
}

double as_finite_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "number must be finite");
    return v;
}

double as_positive_number(const json& j, const std::string& path) {
    const double v = as_finite_number(j, path);
    if (!(v > 0.0)) fail(path, "expected a positive number");
    return v;
}

int as_positive_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < 1 || v > 1000000) fail(path, "expected a positive integer");
    return static_cast<int>(v);
}

std::string as_nonempty_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    auto s = j.get<std::string>();
    if (s.empty()) fail(path, "string must be non-empty");
    return s;
}

Vec as_number_vector(const json& j, const std::string& path, int n) {
    if (!j.is_array()) fail(path, "expected an array");
    if (static_cast<int>(j.size()) != n) {
        fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    }
    Vec v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(as_finite_number(j[i], path + "/" + std::to_string(i)));
    }
    return v;
}

ActivationSpec parse_activation(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an activation object");
    const std::string kind = as_nonempty_string(member(j, path, "kind"), path + "/kind");
    if (kind == "tanh") {
        require_keys(j, path, {"kind", "gain"});
        const double gain = as_positive_number(member(j, path, "gain"), path + "/gain");
        return ActivationSpec::tanh_gain(gain);
    }
    if (kind == "linear") {
        require_keys(j, path, {"kind"});
        return ActivationSpec::linear();
    }
    if (kind == "expression") {
        require_keys(j, path, {"kind", "text"});
        const std::string text = as_nonempty_string(member(j, path, "text"), path + "/text");
        try {
            return ActivationSpec::expression(text);
        } catch (const ParseError& e) {
            fail(path + "/text", e.what());
        }
    }
    fail(path + "/kind", "expected one of \"tanh\", \"linear\", \"expression\"");
}

AnalysisOverrides parse_overrides(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    require_keys(j, path, {"quad_tol", "margin", "horizon", "seed", "samples"});
    AnalysisOverrides o;
    if (j.contains("quad_tol")) {
        o.quad_tol = as_positive_number(j["quad_tol"], path + "/quad_tol");
    }
    if (j.contains("margin")) {
        const double m = as_finite_number(j["margin"], path + "/margin");
        if (m < 0.0) fail(path + "/margin", "margin must be non-negative");
        o.margin = m;
    }
    if (j.contains("horizon")) {
        o.horizon = as_positive_number(j["horizon"], path + "/horizon");
    }
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<long long>() < 0)) {
            fail(path + "/seed", "expected a non-negative integer");
        }
        o.seed = s.get<std::uint64_t>();
    }
    if (j.contains("samples")) {
        o.samples = as_positive_int(j["samples"], path + "/samples");
    }
    return o;
}

std::optional<double> parse_ball_radius(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() != "unbounded") {
            fail(path, "expected a positive number or \"unbounded\"");
        }
        return std::nullopt;
    }
    return as_positive_number(j, path);
}

} // namespace

SystemFile parse_system_file(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("/: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("/", "expected a JSON object");

    SystemFile file;
    file.canonical_json = j.dump();

    const std::string kind = as_nonempty_string(member(j, "", "kind"), "/kind");
    if (j.contains("label")) {
        file.label = as_nonempty_string(j["label"], "/label");
    }
    if (j.contains("analysis")) {
        file.overrides = parse_overrides(j["analysis"], "/analysis");
    }

    if (kind == "expressions") {
        file.kind = SystemFile::Kind::expressions;
        require_keys(j, "", {"kind", "n", "components", "ball_radius", "label", "analysis"});
        file.n = as_positive_int(member(j, "", "n"), "/n");
        if (file.n > 16) fail("/n", "at most 16 dimensions are supported");
        const json& comps = member(j, "", "components");
        if (!comps.is_array()) fail("/components", "expected an array");
        if (static_cast<int>(comps.size()) != file.n) {
            fail("/components", "expected " + std::to_string(file.n) + " component expressions, got " +
                                    std::to_string(comps.size()));
        }
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::string path = "/components/" + std::to_string(i);
            const std::string src = as_nonempty_string(comps[i], path);
            try {
                (void)Expression::parse(src, file.n);
            } catch (const ParseError& e) {
                fail(path, e.what());
            }
            file.components.push_back(src);
        }
        file.ball_radius = parse_ball_radius(member(j, "", "ball_radius"), "/ball_radius");
        return file;
    }

    if (kind == "hopfield") {
        file.kind = SystemFile::Kind::hopfield;
        require_keys(j, "", {"kind", "n", "a", "W", "theta", "activations", "x_star",
                             "external_input", "label", "analysis"});
        const int n = as_positive_int(member(j, "", "n"), "/n");
        if (n > 16) fail("/n", "at most 16 units are supported");

        HopfieldNetwork net;
        net.n = n;
        net.decay = as_number_vector(member(j, "", "a"), "/a", n);
        for (int i = 0; i < n; ++i) {
            if (!(net.decay[i] > 0.0)) {
                fail("/a/" + std::to_string(i), "decay rates must be positive");
            }
        }
        const json& w = member(j, "", "W");
        if (!w.is_array() || static_cast<int>(w.size()) != n) {
            fail("/W", "expected " + std::to_string(n) + " rows");
        }
        net.weights = Matrix(n, n);
        for (int i = 0; i < n; ++i) {
            const Vec row = as_number_vector(w[i], "/W/" + std::to_string(i), n);
            for (int c = 0; c < n; ++c) net.weights(i, c) = row[c];
        }
        net.bias = as_number_vector(member(j, "", "theta"), "/theta", n);

        const json& acts = member(j, "", "activations");
        if (!acts.is_array() || acts.empty()) fail("/activations", "expected a non-empty array");
        if (acts[0].is_array()) {
            // per-edge form: n rows of n specs
            if (static_cast<int>(acts.size()) != n) {
                fail("/activations", "expected " + std::to_string(n) + " rows");
            }
            for (int i = 0; i < n; ++i) {
                const std::string row_path = "/activations/" + std::to_string(i);
                if (!acts[i].is_array() || static_cast<int>(acts[i].size()) != n) {
                    fail(row_path, "expected " + std::to_string(n) + " activation specs");
                }
                for (int c = 0; c < n; ++c) {
                    net.activations.push_back(
                        parse_activation(acts[i][c], row_path + "/" + std::to_string(c)));
                }
            }
        } else {
            // per-unit form
            if (static_cast<int>(acts.size()) != n) {
                fail("/activations", "expected " + std::to_string(n) + " activation specs");
            }
            for (int c = 0; c < n; ++c) {
                net.activations.push_back(
                    parse_activation(acts[c], "/activations/" + std::to_string(c)));
            }
        }

        if (j.contains("x_star")) {
            net.equilibrium = as_number_vector(j["x_star"], "/x_star", n);
        }
        if (j.contains("external_input")) {
            net.external_input = as_number_vector(j["external_input"], "/external_input", n);
        }
        net.label = file.label;
        file.n = n;
        file.network = std::move(net);
        return file;
    }

    if (kind == "builtin") {
        file.kind = SystemFile::Kind::builtin;
        require_keys(j, "", {"kind", "name", "label", "analysis"});
        const std::string name = as_nonempty_string(member(j, "", "name"), "/name");
        bool known = false;
        for (const std::string& b : builtin_names()) {
            if (b == name) {
                known = true;
                break;
            }
        }
        if (!known) fail("/name", "unknown builtin '" + name + "'");
        file.builtin_name = name;
        return file;
    }

    fail("/kind", "expected one of \"expressions\", \"hopfield\", \"builtin\"");
}

SystemFile load_system_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open system file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system_file(buf.str());
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"example-2.1", "example-2.2", "hopfield-2"};
    return names;
}

SystemFile builtin_system_file(const std::string& name) {
    std::string text;
    if (name == "example-2.1") {
        text = R"json({"kind":"expressions","n":2,
                "components":["-2*x1 + x2^2","x1^2 - 2*x2"],
                "ball_radius":2.8284271247461903,"label":"example-2.1"})json";
    } else if (name == "example-2.2") {
        text = R"json({"kind":"expressions","n":2,
                "components":["-4*x1 + x1*sech(x1) + 4*x2","-x1 - 6*x2 - x2*cos(x2)"],
                "ball_radius":"unbounded","label":"example-2.2"})json";
    } else if (name == "hopfield-2") {
        text = R"json({"kind":"hopfield","n":2,"a":[10,10],"W":[[1,1],[1,1]],"theta":[0,0],
                "activations":[[{"kind":"expression","text":"-3*x1 - tanh(3*x1)"},
                                {"kind":"linear"}],
                               [{"kind":"linear"},
                                {"kind":"expression","text":"-x1 + tanh(3*x1)/5"}]],
                "x_star":[0,0],"label":"hopfield-2"})json";
    } else {
        throw InputError("/name: unknown builtin '" + name + "'");
    }
    return parse_system_file(text);
}

LoadedSystem instantiate(const SystemFile& file) {
    switch (file.kind) {
        case SystemFile::Kind::builtin: {
            LoadedSystem loaded = instantiate(builtin_system_file(file.builtin_name));
            // keep the caller's document (and overrides) as the echo of record
            SystemFile original = file;
            loaded.file = std::move(original);
            return loaded;
        }
        case SystemFile::Kind::expressions: {
            try {
                std::string label = file.label.empty()
                                        ? "expressions(n=" + std::to_string(file.n) + ")"
                                        : file.label;
                SystemDef sys = build_system(file.n, file.components, file.ball_radius,
                                             std::move(label));
                return LoadedSystem{std::move(sys), std::nullopt, file};
            } catch (const InputError&) {
                throw;
            } catch (const Error& e) {
                throw InputError(std::string("/components: ") + e.what());
            }
        }
        case SystemFile::Kind::hopfield: {
            try {
                return LoadedSystem{compile(*file.network), file.network, file};
            } catch (const InputError&) {
                throw;
            } catch (const Error& e) {
                throw InputError(std::string("/: ") + e.what());
            }
        }
    }
    throw InputError("/kind: unsupported kind");
}

} // namespace lyapcert
