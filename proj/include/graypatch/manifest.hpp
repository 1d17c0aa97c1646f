#pragma once

#include "graypatch/record.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace graypatch {

class manifest_error : public std::runtime_error {
public:
    manifest_error(std::size_t line, const std::string& what)
        : std::runtime_error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Record <-> JSON. Field order is fixed by insertion order.
// ---------------------------------------------------------------------------

inline ordered_json record_to_json(const TransformRecord& r) {
    ordered_json j;
    j["ordinal"] = r.ordinal;
    j["path"] = r.path;
    j["output"] = r.output;
    j["mode"] = to_string(r.mode);
    j["stream_key"] = r.stream_key;
    if (r.error) {
        j["status"] = "error";
        j["error"] = *r.error;
        return j;
    }
    j["status"] = "ok";
    j["width"] = r.width;
    j["height"] = r.height;
    j["channels"] = r.channels;
    if (r.ggpr) {
        j["ggpr"] = {{"p", r.ggpr->p}, {"u", r.ggpr->u}, {"fired", r.ggpr->fired}};
    }
    if (r.lgpr) {
        ordered_json l = {{"p", r.lgpr->p}, {"u", r.lgpr->u}, {"fired", r.lgpr->fired}, {"attempts", r.lgpr->attempts}};
        if (r.lgpr->rect) {
            const auto& rc = *r.lgpr->rect;
            l["rect"] = {{"x", rc.x}, {"y", rc.y}, {"w", rc.w}, {"h", rc.h}};
        } else {
            l["rect"] = nullptr;
        }
        j["lgpr"] = std::move(l);
    }
    if (r.mmd) {
        const auto& m = *r.mmd;
        ordered_json o = {{"p_gray", m.p_gray},
                          {"p_gray_fuse", m.p_gray_fuse},
                          {"p_sketch_fuse", m.p_sketch_fuse},
                          {"two_channel_prob", m.two_channel_prob},
                          {"sketch_op", to_string(m.sketch.op)},
                          {"sketch_sigma", m.sketch.sigma},
                          {"outcome", to_string(m.outcome.kind)}};
        if (m.outcome.channels) {
            o["channels"] = m.outcome.channels->letters();
        } else {
            o["channels"] = nullptr;
        }
        o["draws"] = m.outcome.draws;
        j["mmd"] = std::move(o);
    }
    if (r.resize) {
        j["resize"] = {{"down_w", r.resize->down_w}, {"down_h", r.resize->down_h},
                       {"up_w", r.resize->up_w}, {"up_h", r.resize->up_h}};
    }
    j["draws"] = r.draws;
    return j;
}

inline TransformRecord record_from_json(const ordered_json& j) {
    TransformRecord r;
    r.ordinal = j.at("ordinal").get<std::uint64_t>();
    r.path = j.at("path").get<std::string>();
    r.output = j.at("output").get<std::string>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.stream_key = j.at("stream_key").get<std::uint64_t>();
    const auto status = j.at("status").get<std::string>();
    if (status == "error") {
        r.error = j.at("error").get<std::string>();
        return r;
    }
    if (status != "ok") throw config_error("unknown status '" + status + "'");
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    r.channels = j.at("channels").get<int>();
    if (j.contains("ggpr")) {
        const auto& g = j["ggpr"];
        r.ggpr = GgprTrace{g.at("p").get<double>(), g.at("u").get<double>(), g.at("fired").get<bool>()};
    }
    if (j.contains("lgpr")) {
        const auto& l = j["lgpr"];
        LgprTrace t{l.at("p").get<double>(), l.at("u").get<double>(), l.at("fired").get<bool>(),
                    l.at("attempts").get<int>(), std::nullopt};
        if (const auto& rc = l.at("rect"); !rc.is_null()) {
            t.rect = Rect{rc.at("x").get<int>(), rc.at("y").get<int>(), rc.at("w").get<int>(), rc.at("h").get<int>()};
        }
        r.lgpr = t;
    }
    if (j.contains("mmd")) {
        const auto& o = j["mmd"];
        MmdTrace m;
        m.p_gray = o.at("p_gray").get<double>();
        m.p_gray_fuse = o.at("p_gray_fuse").get<double>();
        m.p_sketch_fuse = o.at("p_sketch_fuse").get<double>();
        m.two_channel_prob = o.at("two_channel_prob").get<double>();
        m.sketch.op = parse_sketch_operator(o.at("sketch_op").get<std::string>());
        m.sketch.sigma = o.at("sketch_sigma").get<double>();
        m.outcome.kind = parse_defense_kind(o.at("outcome").get<std::string>());
        if (const auto& c = o.at("channels"); !c.is_null()) m.outcome.channels = ChannelSet::parse(c.get<std::string>());
        m.outcome.draws = o.at("draws").get<std::vector<double>>();
        const bool fused = m.outcome.kind == DefenseKind::gray_fuse || m.outcome.kind == DefenseKind::sketch_fuse;
        if (fused != m.outcome.channels.has_value()) {
            throw config_error("channel subset must be present exactly for fusion outcomes");
        }
        if (m.outcome.channels && (m.outcome.channels->size() < 1 || m.outcome.channels->size() > 2)) {
            throw config_error("channel subset must hold 1 or 2 channels");
        }
        r.mmd = std::move(m);
    }
    if (j.contains("resize")) {
        const auto& z = j["resize"];
        r.resize = ResizeTrace{z.at("down_w").get<int>(), z.at("down_h").get<int>(), z.at("up_w").get<int>(),
                               z.at("up_h").get<int>()};
    }
    r.draws = j.at("draws").get<std::uint64_t>();
    return r;
}

/// One JSON object per line, newline-terminated. No records -> empty text.
inline std::string write_manifest(const std::vector<TransformRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<TransformRecord> read_manifest(std::string_view text) {
    std::vector<TransformRecord> records;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            records.push_back(record_from_json(ordered_json::parse(line)));
        } catch (const std::exception& e) {
            throw manifest_error(line_no, e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// A Bernoulli event checked against its configured probability. With
/// per-trial probabilities p_i the expected count is sum(p_i) and the
/// variance sum(p_i (1 - p_i)).
struct GateStat {
    std::string name;
    std::uint64_t trials = 0;
    std::uint64_t count = 0;
    double expected = 0.0;
    double variance = 0.0;

    [[nodiscard]] double frequency() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(trials);
    }
    [[nodiscard]] double probability() const noexcept {
        return trials == 0 ? 0.0 : expected / static_cast<double>(trials);
    }
    /// Binomial z-score; empty when the event is deterministic.
    [[nodiscard]] std::optional<double> z_score() const noexcept {
        if (variance <= 0.0) {
            if (std::abs(static_cast<double>(count) - expected) < 1e-9) return 0.0;
            return std::nullopt;
        }
        return (static_cast<double>(count) - expected) / std::sqrt(variance);
    }

    void add(bool hit, double p) noexcept {
        ++trials;
        if (hit) ++count;
        expected += p;
        variance += p * (1.0 - p);
    }
};

struct RunStats {
    std::uint64_t total = 0;
    std::uint64_t failed = 0;
    std::map<std::string, std::uint64_t> outcomes; // partitions `total`
    std::vector<GateStat> gates;

    [[nodiscard]] double frequency(const std::string& outcome) const {
        const auto it = outcomes.find(outcome);
        if (it == outcomes.end() || total == 0) return 0.0;
        return static_cast<double>(it->second) / static_cast<double>(total);
    }

    [[nodiscard]] const GateStat* gate(std::string_view name) const {
        for (const auto& g : gates) {
            if (g.name == name) return &g;
        }
        return nullptr;
    }
};

/// The single label each record ends up with; labels partition a run.
inline std::string outcome_label(const TransformRecord& r) {
    if (!r.ok()) return "error";
    if (r.ggpr && r.ggpr->fired) return "ggpr";
    if (r.lgpr && r.lgpr->fired) return r.lgpr->rect ? "lgpr" : "lgpr_no_fit";
    if (r.mmd) return std::string(to_string(r.mmd->outcome.kind));
    if (r.resize) return "resized";
    return "unchanged";
}

inline RunStats compute_stats(const std::vector<TransformRecord>& records) {
    RunStats s;
    GateStat ggpr{"ggpr"}, lgpr{"lgpr"};
    GateStat sketch{"sketch_fuse"}, fuse{"gray_fuse"}, gray{"pure_gray"}, pass{"pass_through"};
    bool any_mmd = false;
    for (const auto& r : records) {
        ++s.total;
        ++s.outcomes[outcome_label(r)];
        if (!r.ok()) {
            ++s.failed;
            continue;
        }
        if (r.ggpr) ggpr.add(r.ggpr->fired, r.ggpr->p);
        if (r.lgpr) lgpr.add(r.lgpr->fired, r.lgpr->p);
        if (r.mmd) {
            any_mmd = true;
            const auto& m = *r.mmd;
            const auto k = m.outcome.kind;
            sketch.add(k == DefenseKind::sketch_fuse, m.p_sketch_fuse);
            fuse.add(k == DefenseKind::gray_fuse, m.p_gray_fuse);
            gray.add(k == DefenseKind::pure_gray, m.p_gray);
            pass.add(k == DefenseKind::pass_through, 1.0 - (m.p_gray + m.p_gray_fuse + m.p_sketch_fuse));
        }
    }
    if (ggpr.trials) s.gates.push_back(ggpr);
    if (lgpr.trials) s.gates.push_back(lgpr);
    if (any_mmd) {
        s.gates.push_back(gray);
        s.gates.push_back(fuse);
        s.gates.push_back(sketch);
        s.gates.push_back(pass);
    }
    return s;
}

inline ordered_json stats_to_json(const RunStats& s) {
    ordered_json j;
    j["total"] = s.total;
    j["failed"] = s.failed;
    ordered_json outcomes = ordered_json::object();
    for (const auto& [name, count] : s.outcomes) {
        outcomes[name] = {{"count", count}, {"frequency", s.frequency(name)}};
    }
    j["outcomes"] = std::move(outcomes);
    ordered_json gates = ordered_json::array();
    for (const auto& g : s.gates) {
        ordered_json e = {{"name", g.name},
                          {"trials", g.trials},
                          {"count", g.count},
                          {"frequency", g.frequency()},
                          {"probability", g.probability()}};
        if (auto z = g.z_score()) {
            e["z"] = *z;
        } else {
            e["z"] = nullptr;
        }
        gates.push_back(std::move(e));
    }
    j["gates"] = std::move(gates);
    return j;
}

} // namespace graypatch
