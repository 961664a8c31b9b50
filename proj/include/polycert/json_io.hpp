#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polycert/bernstein.hpp"
#include "polycert/lyapunov.hpp"
#include "polycert/multi_index.hpp"
#include "polycert/polynomial.hpp"
#include "polycert/rational.hpp"
#include "polycert/sobolev.hpp"
#include "polycert/weighted.hpp"

namespace polycert {

struct JsonError : std::runtime_error {
    explicit JsonError(const std::string& msg) : std::runtime_error("invalid JSON input: " + msg) {}
};

// Canonical polynomial serialization: terms in graded-lex order with exact
// rational coefficient strings. Serializing twice yields identical bytes.
inline nlohmann::json polynomial_to_json(const Polynomial& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [alpha, c] : p.terms()) {
        nlohmann::json t;
        t["exp"] = alpha.entries();
        t["coeff"] = rational_to_string(c);
        terms.push_back(std::move(t));
    }
    return {{"n", p.dimension()}, {"terms", std::move(terms)}};
}

inline Polynomial polynomial_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw JsonError("polynomial must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer()) {
        throw JsonError("polynomial needs an integer field \"n\"");
    }
    int n = j["n"].get<int>();
    if (n < 1) throw JsonError("polynomial dimension must be positive");
    if (!j.contains("terms") || !j["terms"].is_array()) {
        throw JsonError("polynomial needs an array field \"terms\"");
    }
    Polynomial p(n);
    size_t idx = 0;
    for (const auto& t : j["terms"]) {
        std::string where = "terms[" + std::to_string(idx++) + "]";
        if (!t.is_object() || !t.contains("exp") || !t.contains("coeff")) {
            throw JsonError(where + " must be an object with \"exp\" and \"coeff\"");
        }
        if (!t["exp"].is_array() || t["exp"].size() != static_cast<size_t>(n)) {
            throw JsonError(where + ".exp must be an array of length " + std::to_string(n));
        }
        std::vector<uint32_t> e;
        for (const auto& v : t["exp"]) {
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                throw JsonError(where + ".exp entries must be nonnegative integers");
            }
            e.push_back(v.get<uint32_t>());
        }
        if (!t["coeff"].is_string()) throw JsonError(where + ".coeff must be a rational string");
        Rational c;
        try {
            c = rational_from_string(t["coeff"].get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw JsonError(where + ".coeff: " + ex.what());
        }
        p.add_term(MultiIndex(std::move(e)), std::move(c));
    }
    return p;
}

inline nlohmann::json approx_info_to_json(const ApproxInfo& info) {
    nlohmann::json j;
    j["alpha"] = info.alpha.dimension() > 0 ? nlohmann::json(info.alpha.entries())
                                            : nlohmann::json::array();
    j["degree"] = info.degree;
    j["iterates"] = info.iterates;
    j["sampled_error"] = info.sampled_error;
    j["effective_error"] = info.effective_error;
    if (info.taylor_order > 0) j["taylor_order"] = info.taylor_order;
    return j;
}

inline nlohmann::json sobolev_report_to_json(const SobolevReport& rep) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& info : rep.per_alpha) per.push_back(approx_info_to_json(info));
    return {{"epsilon", rep.epsilon},
            {"posthoc_error", rep.posthoc_error},
            {"worst_alpha", rep.worst_alpha.dimension() > 0
                                ? nlohmann::json(rep.worst_alpha.entries())
                                : nlohmann::json::array()},
            {"per_alpha", std::move(per)},
            {"grid", rep.grid_density},
            {"pass", rep.posthoc_error <= rep.epsilon}};
}

inline nlohmann::json weighted_sobolev_report_to_json(const WeightedSobolevReport& rep) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& info : rep.per_alpha) per.push_back(approx_info_to_json(info));
    return {{"epsilon", rep.epsilon},
            {"posthoc_error", rep.posthoc_error},
            {"worst_alpha", rep.worst_alpha.dimension() > 0
                                ? nlohmann::json(rep.worst_alpha.entries())
                                : nlohmann::json::array()},
            {"per_alpha", std::move(per)},
            {"grid", rep.grid_density},
            {"eta", rep.eta},
            {"pass", rep.posthoc_error <= rep.epsilon}};
}

inline nlohmann::json inequality_to_json(const InequalityResult& iq) {
    return {{"name", iq.name}, {"pass", iq.pass}, {"margin", iq.margin}, {"witness", iq.witness}};
}

inline nlohmann::json certificate_report_to_json(const CertificateReport& rep) {
    nlohmann::json iqs = nlohmann::json::array();
    for (const auto& iq : rep.inequalities) iqs.push_back(inequality_to_json(iq));
    return {{"pass", rep.pass}, {"grid", rep.grid_density}, {"inequalities", std::move(iqs)}};
}

inline nlohmann::json transfer_report_to_json(const TransferReport& rep) {
    return {{"hypotheses", certificate_report_to_json(rep.hypothesis_report)},
            {"targets", certificate_report_to_json(rep.target_report)},
            {"weighted", weighted_sobolev_report_to_json(rep.weighted)},
            {"sup_norm", rep.sup_norm},
            {"margin", rep.margin},
            {"weighted_eps", rep.weighted_eps},
            {"pass", rep.target_report.pass}};
}

// Certificate file layout: polynomial v, rational strings for epsilon and
// the ball level, expression strings for the field (must convert exactly to
// polynomials), and the four square lists as arrays of polynomials.
struct SOSCertificateFile {
    SOSCertificate certificate;
    std::vector<Polynomial> field;
};

inline SOSCertificateFile sos_certificate_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw JsonError("certificate must be an object");
    for (const char* key : {"n", "v", "epsilon", "r", "f", "s1", "s2", "t1", "t2"}) {
        if (!j.contains(key)) throw JsonError(std::string("certificate needs field \"") + key + "\"");
    }
    if (!j["n"].is_number_integer() || j["n"].get<int>() < 1) {
        throw JsonError("certificate field \"n\" must be a positive integer");
    }
    int n = j["n"].get<int>();

    Polynomial v = polynomial_from_json(j["v"]);
    if (v.dimension() != n) throw JsonError("certificate \"v\" dimension mismatch");

    auto rational_field = [&](const char* key) {
        if (!j[key].is_string()) {
            throw JsonError(std::string("certificate field \"") + key + "\" must be a rational string");
        }
        try {
            return rational_from_string(j[key].get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw JsonError(std::string("certificate field \"") + key + "\": " + ex.what());
        }
    };
    Rational eps = rational_field("epsilon");
    Rational level = rational_field("r");

    if (!j["f"].is_array() || j["f"].size() != static_cast<size_t>(n)) {
        throw JsonError("certificate field \"f\" must be an array of n expressions");
    }
    std::vector<Polynomial> f;
    for (const auto& comp : j["f"]) {
        if (!comp.is_string()) throw JsonError("field components must be expression strings");
        Expression e = parse_expression(comp.get<std::string>(), n);
        auto poly = try_polynomial(e);
        if (!poly) {
            throw JsonError("field component \"" + comp.get<std::string>() +
                            "\" is not exactly polynomial");
        }
        f.push_back(std::move(*poly));
    }

    auto square_list = [&](const char* key) {
        if (!j[key].is_array()) {
            throw JsonError(std::string("certificate field \"") + key + "\" must be an array");
        }
        std::vector<Polynomial> list;
        for (const auto& g : j[key]) {
            Polynomial gp = polynomial_from_json(g);
            if (gp.dimension() != n) {
                throw JsonError(std::string("certificate \"") + key + "\" dimension mismatch");
            }
            list.push_back(std::move(gp));
        }
        return list;
    };

    try {
        SOSCertificate cert(std::move(v), std::move(eps), std::move(level), square_list("s1"),
                            square_list("s2"), square_list("t1"), square_list("t2"));
        return {std::move(cert), std::move(f)};
    } catch (const std::invalid_argument& ex) {
        throw JsonError(ex.what());
    }
}

inline nlohmann::json sos_result_to_json(const SOSCheckResult& res) {
    return {{"valid", res.valid},
            {"residual_shape", polynomial_to_json(res.residual_shape)},
            {"residual_decay", polynomial_to_json(res.residual_decay)}};
}

}  // namespace polycert
