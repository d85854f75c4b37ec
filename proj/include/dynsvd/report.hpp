#pragma once

#include <string>
#include <vector>

#include "dynsvd/config.hpp"
#include "dynsvd/engine.hpp"
#include "dynsvd/experiments.hpp"

namespace dynsvd {

/// Deterministic shortest-round-trip formatting; infinities print as
/// "inf"/"-inf". Every artifact writer goes through this.
std::string format_double(double v);

/// Per-slice run log. Header:
///   t,restarted,loss,bound,margin,loss_post,bound_post,edge_changes,m_s,
///   nabla_support,row_touches,entry_visits,loss_update_visits,monitor_seconds,
///   restart_seconds,oracle_min_loss,true_rel_error
/// The two oracle columns stay empty unless ground truth is supplied. The
/// leading comment lines embed the tool version and the resolved config.
/// Timing columns are written as 0 unless cfg.timings is set.
void write_run_csv(const std::string& path, const RunConfig& cfg, const RunRecord& rec,
                   const std::vector<double>* oracle);

void write_run_json(const std::string& path, const RunConfig& cfg, const RunRecord& rec,
                    const std::vector<double>* oracle);

/// One tuned policy evaluation, serializable and re-loadable losslessly.
struct ExperimentReport {
    std::string dataset;
    std::uint64_t seed = 0;
    PolicyOutcome outcome;

    std::string to_json_string() const;
    static ExperimentReport from_json_string(const std::string& text);
};

/// Long-format comparison rows: dataset,policy,params,seed,metric,value,note
struct BenchRow {
    std::string dataset;
    std::string policy;
    std::string params;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    std::string note;
};

void write_bench_csv(const std::string& path, const std::string& config_json,
                     const std::vector<BenchRow>& rows);
void write_bench_json(const std::string& path, const std::string& config_json,
                      const std::vector<BenchRow>& rows);

/// Header: interval,mean_r,std_r,samples
void write_profile_csv(const std::string& path, const std::string& config_json,
                       const std::vector<ProfilePoint>& points);

}  // namespace dynsvd
