#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "metric_engine.hpp"
#include "up_checker.hpp"

namespace fracmetric {

using Json = nlohmann::ordered_json;

inline Json certificate_to_json(const BellmanOperator& op, const Verdict& v) {
    const auto& jhat = op.jhat();
    Json out;
    if (auto* up = std::get_if<ProvenUp>(&v)) {
        out["kind"] = "up";
        Json u = Json::object();
        for (size_t i = 0; i < jhat.size(); ++i) u[jhat[i].str()] = to_string(up->u[i]);
        out["u"] = u;
    } else if (auto* no = std::get_if<ProvenNotUp>(&v)) {
        const auto& c = no->certificate;
        out["kind"] = "notup";
        Json s = Json::array(), policy = Json::object(), vv = Json::object();
        for (size_t t = 0; t < c.labels.size(); ++t) {
            auto key = c.labels[t].str();
            s.push_back(key);
            policy[key] = c.policy[t].vertex_labels(op.graph());
            vv[key] = to_string(c.v[t]);
        }
        out["S"] = s;
        out["policy"] = policy;
        out["v"] = vv;
        out["lambda"] = to_string(c.lambda);
    } else {
        throw std::invalid_argument("an undecided verdict carries no certificate");
    }
    return out;
}

/// Reads a certificate back; throws std::invalid_argument on malformed input.
/// Whether it is *valid* is for the verify_* functions to decide.
inline Verdict certificate_from_json(const BellmanOperator& op, const Json& j) {
    const auto& jhat = op.jhat();
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "up") {
            WeightVector u(jhat.size());
            std::vector<char> seen(jhat.size(), 0);
            for (const auto& [key, val] : j.at("u").items()) {
                size_t i = jhat.index(jhat.parse(key));
                if (seen[i]) throw std::invalid_argument("repeated coordinate " + key);
                seen[i] = 1;
                u[i] = parse_rational(val.get<std::string>());
            }
            for (size_t i = 0; i < jhat.size(); ++i)
                if (!seen[i]) throw std::invalid_argument("missing coordinate " + jhat[i].str());
            return ProvenUp{u, "certificate"};
        }
        if (kind == "notup") {
            NotUpCertificate c;
            for (const auto& key : j.at("S")) {
                auto name = key.get<std::string>();
                c.labels.push_back(jhat.parse(name));
                std::vector<VertexId> vs;
                for (const auto& addr : j.at("policy").at(name))
                    vs.push_back(op.graph().vertices().canonicalize(Address::parse(addr.get<std::string>(), op.graph().spec().k)));
                c.policy.push_back(PathRecord::from_vertices(op.graph(), vs));
                c.v.push_back(parse_rational(j.at("v").at(name).get<std::string>()));
            }
            c.lambda = parse_rational(j.at("lambda").get<std::string>());
            return ProvenNotUp{c};
        }
        throw std::invalid_argument("unknown certificate kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
    }
}

/// Re-verifies a certificate exactly.
inline bool verify_certificate(const BellmanOperator& op, const Verdict& v) {
    if (auto* up = std::get_if<ProvenUp>(&v)) return verify_up_certificate(op, up->u);
    if (auto* no = std::get_if<ProvenNotUp>(&v)) return verify_notup_certificate(op, no->certificate);
    return false;
}

inline Json scaling_report_to_json(const ScalingReport& r, int k) {
    Json out;
    out["level"] = r.level;
    out["cell_depth"] = r.cell_depth;
    out["total_diameter"] = to_string(r.total_diameter);
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"word", row.word.str(k)},
                        {"alpha_w", to_string(row.weight)},
                        {"diameter", to_string(row.diameter)},
                        {"ratio", to_string(row.ratio)},
                        {"ratio_decimal", to_decimal(row.ratio)},
                        {"coarse_ratio", to_string(row.coarse_ratio)}});
    out["rows"] = rows;
    out["min_ratio"] = to_string(r.min_ratio);
    out["max_ratio"] = to_string(r.max_ratio);
    out["max_coarse_ratio"] = to_string(r.max_coarse_ratio);
    return out;
}

} // namespace fracmetric
