#include "mfcas/mf_io.hpp"

#include <fstream>
#include <json.hpp>

namespace mfcas {

using nlohmann::json;

namespace {

std::string rat_str(const Rat& r) { return r.get_str(); }

Rat rat_parse(const std::string& s) {
    Rat r(s);
    r.canonicalize();
    return r;
}

json field_to_json(const FieldPtr& f) {
    json j;
    if (f->cyclotomic_order() > 0 && f->levels() == 1) {
        j["cyclotomic"] = f->cyclotomic_order();
        return j;
    }
    json levels = json::array();
    for (int k = 0; k < f->levels(); ++k) {
        const auto& lv = f->level(k);
        json rule = json::array();
        for (auto& [e, c] : lv.power_rule) {
            rule.push_back({{"exps", e}, {"coeff", rat_str(c)}});
        }
        levels.push_back({{"symbol", lv.symbol}, {"degree", lv.degree}, {"rule", rule}});
    }
    j["tower"] = levels;
    if (f->cyclotomic_order() > 0) j["cyclotomic_base"] = f->cyclotomic_order();
    return j;
}

FieldPtr field_from_json(const json& j) {
    if (j.contains("cyclotomic")) return NumberField::cyclotomic(j["cyclotomic"].get<int>());
    FieldPtr f = NumberField::rationals();
    if (j.contains("cyclotomic_base"))
        f = NumberField::cyclotomic(j["cyclotomic_base"].get<int>());
    int start = f->levels();
    for (auto& lvj : j["tower"]) {
        if (start > 0) {
            // skip levels already provided by the cyclotomic base
            --start;
            continue;
        }
        std::map<std::vector<int>, Rat> rule;
        for (auto& rj : lvj["rule"]) {
            std::vector<int> e = rj["exps"].get<std::vector<int>>();
            rule[e] = rat_parse(rj["coeff"].get<std::string>());
        }
        FieldElement rhs(f, {});
        // rebuild rhs from the raw map: it may reference the new level with
        // exponents < degree; NumberField::extend copies coords raw, so wrap
        // the map in a FieldElement on the *current* field
        rhs = FieldElement(f, rule);
        f = f->extend(lvj["symbol"].get<std::string>(), lvj["degree"].get<int>(), rhs);
    }
    return f;
}

}  // namespace

std::string mf_to_json(const MFPtr& m) {
    json j;
    j["field"] = field_to_json(m->ring()->field());
    json vars = json::array();
    for (auto& v : m->ring()->vars()) {
        std::string role = v.role == VarRole::Left     ? "left"
                           : v.role == VarRole::Right ? "right"
                                                      : "internal";
        vars.push_back({{"name", v.name},
                        {"weight_num", v.weight.get_num().get_str()},
                        {"weight_den", v.weight.get_den().get_str()},
                        {"role", role}});
    }
    j["vars"] = vars;
    j["potential_left"] = m->potential_left().str();
    j["potential_right"] = m->potential_right().str();
    auto mat = [&](const PolyMat& a) {
        json rows = json::array();
        for (auto& row : a) {
            json r = json::array();
            for (auto& p : row) r.push_back(p.str());
            rows.push_back(r);
        }
        return rows;
    };
    j["d1"] = mat(m->d1());
    j["d0"] = mat(m->d0());
    if (m->graded()) {
        json g0 = json::array(), g1 = json::array();
        for (auto& c : m->grading().even) g0.push_back(rat_str(c));
        for (auto& c : m->grading().odd) g1.push_back(rat_str(c));
        j["grading"] = {g0, g1};
    }
    if (m->zero_flagged()) j["zero_object"] = true;
    return j.dump(1);
}

MFPtr mf_from_json(const std::string& text) {
    json j = json::parse(text);
    FieldPtr f = field_from_json(j["field"]);
    std::vector<Variable> vars;
    for (auto& vj : j["vars"]) {
        Rat w(rat_parse(vj["weight_num"].get<std::string>() + "/" +
                        vj["weight_den"].get<std::string>()));
        std::string role = vj["role"].get<std::string>();
        VarRole r = role == "left"    ? VarRole::Left
                    : role == "right" ? VarRole::Right
                                      : VarRole::Internal;
        vars.push_back({vj["name"].get<std::string>(), w, r});
    }
    auto ring = std::make_shared<WeightedRing>(f, vars);
    auto mat = [&](const json& rows) {
        PolyMat a;
        for (auto& rj : rows) {
            std::vector<MultiPoly> row;
            for (auto& pj : rj) row.push_back(parse_poly(ring, pj.get<std::string>()));
            a.push_back(std::move(row));
        }
        return a;
    };
    MultiPoly W = parse_poly(ring, j["potential_left"].get<std::string>());
    MultiPoly V = parse_poly(ring, j["potential_right"].get<std::string>());
    std::optional<Grading> g;
    if (j.contains("grading")) {
        Grading gg;
        for (auto& c : j["grading"][0]) gg.even.push_back(rat_parse(c.get<std::string>()));
        for (auto& c : j["grading"][1]) gg.odd.push_back(rat_parse(c.get<std::string>()));
        g = std::move(gg);
    }
    auto m = std::make_shared<MatrixFactorization>(ring, W, V, mat(j["d1"]), mat(j["d0"]),
                                                   std::move(g), true);
    if (j.contains("zero_object") && j["zero_object"].get<bool>()) m->flag_zero();
    return m;
}

void mf_save(const MFPtr& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << mf_to_json(m) << "\n";
}

MFPtr mf_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return mf_from_json(text);
}

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mfcas
