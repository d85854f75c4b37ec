#include "dynsvd/report.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "dynsvd/metrics.hpp"

namespace dynsvd {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return ordered_json(v).dump();  // shortest round-trip representation
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

double timing(double v, const RunConfig& cfg) { return cfg.timings ? v : 0.0; }

ordered_json slice_json(const SliceRecord& s, const RunConfig& cfg,
                        const std::vector<double>* oracle) {
    ordered_json j;
    j["t"] = s.t;
    j["restarted"] = s.restarted;
    j["loss"] = s.loss;
    j["bound"] = s.bound;
    j["margin"] = std::isinf(s.margin) ? ordered_json() : ordered_json(s.margin);
    j["loss_post"] = s.loss_post;
    j["bound_post"] = s.bound_post;
    j["edge_changes"] = s.edge_changes;
    j["m_s"] = s.m_s;
    j["nabla_support"] = s.nabla_support;
    j["row_touches"] = s.row_touches;
    j["entry_visits"] = s.entry_visits;
    j["loss_update_visits"] = s.loss_update_visits;
    j["monitor_seconds"] = timing(s.monitor_seconds, cfg);
    j["restart_seconds"] = timing(s.restart_seconds, cfg);
    if (oracle) {
        const double l = (*oracle)[static_cast<std::size_t>(s.t - 1)];
        j["oracle_min_loss"] = l;
        j["true_rel_error"] = relative_error(s.loss_post, l);
    }
    return j;
}

}  // namespace

void write_run_csv(const std::string& path, const RunConfig& cfg, const RunRecord& rec,
                   const std::vector<double>* oracle) {
    std::ofstream out = open_out(path);
    out << "# tool: " << kToolName << " " << kToolVersion << "\n";
    out << "# config: " << cfg.to_json_string() << "\n";
    out << "t,restarted,loss,bound,margin,loss_post,bound_post,edge_changes,m_s,"
           "nabla_support,row_touches,entry_visits,loss_update_visits,monitor_seconds,"
           "restart_seconds,oracle_min_loss,true_rel_error\n";
    for (const auto& s : rec.slices) {
        out << s.t << ',' << (s.restarted ? 1 : 0) << ',' << format_double(s.loss) << ','
            << format_double(s.bound) << ',' << format_double(s.margin) << ','
            << format_double(s.loss_post) << ',' << format_double(s.bound_post) << ','
            << s.edge_changes << ',' << s.m_s << ',' << s.nabla_support << ','
            << s.row_touches << ',' << s.entry_visits << ',' << s.loss_update_visits << ','
            << format_double(timing(s.monitor_seconds, cfg)) << ','
            << format_double(timing(s.restart_seconds, cfg)) << ',';
        if (oracle) {
            const double l = (*oracle)[static_cast<std::size_t>(s.t - 1)];
            out << format_double(l) << ',' << format_double(relative_error(s.loss_post, l));
        } else {
            out << ',';
        }
        out << '\n';
    }
}

void write_run_json(const std::string& path, const RunConfig& cfg, const RunRecord& rec,
                    const std::vector<double>* oracle) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config"] = ordered_json::parse(cfg.to_json_string());
    j["restart_count"] = rec.restart_count;
    j["initial_loss"] = rec.initial_loss;
    j["init_seconds"] = timing(rec.init_seconds, cfg);
    j["monitor_seconds"] = timing(rec.total_monitor_seconds(), cfg);
    j["restart_seconds"] = timing(rec.total_restart_seconds(), cfg);
    j["slices"] = ordered_json::array();
    for (const auto& s : rec.slices) j["slices"].push_back(slice_json(s, cfg, oracle));
    j["between_restarts"] = ordered_json::array();
    for (const auto& b : between_restart_stats(rec)) {
        ordered_json bj;
        bj["edges"] = b.edges;
        bj["slices"] = b.slices;
        bj["loss_change"] = b.loss_change;
        j["between_restarts"].push_back(bj);
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

std::string ExperimentReport::to_json_string() const {
    ordered_json j;
    j["dataset"] = dataset;
    j["seed"] = seed;
    j["policy"] = outcome.policy;
    j["params"] = outcome.params;
    j["knob"] = outcome.knob;
    j["exact"] = outcome.exact;
    j["restarts"] = outcome.restarts;
    j["max_r"] = outcome.errors.max_r;
    j["avg_r"] = outcome.errors.avg_r;
    j["r"] = outcome.errors.r;
    j["monitor_seconds"] = outcome.monitor_seconds;
    j["restart_seconds"] = outcome.restart_seconds;
    return j.dump();
}

ExperimentReport ExperimentReport::from_json_string(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    ExperimentReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.outcome.policy = j.at("policy").get<std::string>();
    r.outcome.params = j.at("params").get<std::string>();
    r.outcome.knob = j.at("knob").get<double>();
    r.outcome.exact = j.at("exact").get<bool>();
    r.outcome.restarts = j.at("restarts").get<int>();
    r.outcome.errors.max_r = j.at("max_r").get<double>();
    r.outcome.errors.avg_r = j.at("avg_r").get<double>();
    r.outcome.errors.r = j.at("r").get<std::vector<double>>();
    r.outcome.monitor_seconds = j.at("monitor_seconds").get<double>();
    r.outcome.restart_seconds = j.at("restart_seconds").get<double>();
    return r;
}

void write_bench_csv(const std::string& path, const std::string& config_json,
                     const std::vector<BenchRow>& rows) {
    std::ofstream out = open_out(path);
    out << "# tool: " << kToolName << " " << kToolVersion << "\n";
    out << "# config: " << config_json << "\n";
    out << "dataset,policy,params,seed,metric,value,note\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.policy << ",\"" << r.params << "\"," << r.seed << ','
            << r.metric << ',' << format_double(r.value) << ',' << r.note << '\n';
    }
}

void write_bench_json(const std::string& path, const std::string& config_json,
                      const std::vector<BenchRow>& rows) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config"] = ordered_json::parse(config_json);
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json rj;
        rj["dataset"] = r.dataset;
        rj["policy"] = r.policy;
        rj["params"] = r.params;
        rj["seed"] = r.seed;
        rj["metric"] = r.metric;
        rj["value"] = std::isfinite(r.value) ? ordered_json(r.value) : ordered_json();
        rj["note"] = r.note;
        j["rows"].push_back(rj);
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_profile_csv(const std::string& path, const std::string& config_json,
                       const std::vector<ProfilePoint>& points) {
    std::ofstream out = open_out(path);
    out << "# tool: " << kToolName << " " << kToolVersion << "\n";
    out << "# config: " << config_json << "\n";
    out << "interval,mean_r,std_r,samples\n";
    for (const auto& p : points) {
        out << p.interval << ',' << format_double(p.mean_r) << ',' << format_double(p.std_r)
            << ',' << p.samples << '\n';
    }
}

}  // namespace dynsvd
