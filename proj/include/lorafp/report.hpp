#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lorafp/eval.hpp"
#include "lorafp/harness.hpp"

namespace lorafp {

// Report emission. Every writer produces deterministic bytes for identical inputs;
// writing is meant to stay on one thread (the compute behind it parallelizes, the
// files do not).

void ensure_directory(const std::string& dir);

// gateways,messages rows ascending by gateway count.
void write_table1_csv(const std::string& path, const std::map<int, std::size_t>& hist);

// bin_low_dbm,count rows, ascending bins.
void write_rssi_hist_csv(const std::string& path,
                         std::span<const std::pair<double, std::size_t>> bins);

// <axis>,val_mean_m,val_median_m,is_best curve rows.
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

// One-row summary: best value plus validation and test stats at the best value.
void write_sweep_summary_csv(const std::string& path, const SweepResult& sweep);

// metric,representation,best_k,val_mean_m,val_median_m rows.
void write_table2_csv(const std::string& path, const Table2Result& table);

struct Table3Row {
    std::string method;
    std::string split;
    ErrorStats stats;
};

// method,split,count,mean_m,median_m,p75_m,p90_m,p95_m rows.
void write_table3_csv(const std::string& path, std::span<const Table3Row> rows);

// epoch,train_loss,val_loss,is_best rows, one per epoch.
void write_loss_csv(const std::string& path, const TrainingHistory& history);

// index,true_lat,true_lon,pred_lat,pred_lon,error_m rows; index refers to the
// original dataset row.
void write_predictions_csv(const std::string& path, std::span<const std::size_t> indices,
                           std::span<const LatLon> truths, std::span<const LatLon> predictions);

// Reads whichever report CSVs exist in `dir` and renders companions next to them:
// an SVG chart per figure file plus a plain-text digest of the tables.
// Returns the files written (paths relative to `dir`).
std::vector<std::string> render_report(const std::string& dir);

}  // namespace lorafp
