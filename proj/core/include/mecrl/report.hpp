#pragma once

// CSV and SVG emission for training curves.
//
// aggregate.csv:  episode,mean_return,std_return,run0,...,run{k-1}
// run_{k}.csv:    episode,mean_true_return,sigma,true_u0..,perceived_u0..
// Floats use shortest round-trip decimals and lines end in '\n'.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mecrl/harness.hpp"

namespace mecrl::harness {

std::string aggregate_csv(const AggregateSeries& agg, const std::vector<RunSeries>& runs);
void write_csv(const AggregateSeries& agg, const std::vector<RunSeries>& runs, const std::filesystem::path& path);

std::string run_csv(const RunSeries& run);
void write_run_csv(const RunSeries& run, const std::filesystem::path& path);

struct AggregateTable {
  std::vector<std::size_t> episodes;
  AggregateSeries agg;
  std::vector<std::vector<double>> runs;  // runs[k][episode]
};

AggregateTable read_aggregate_csv(const std::filesystem::path& path);
AggregateTable parse_aggregate_csv(const std::string& text);

using LabeledSeries = std::pair<std::string, AggregateSeries>;

std::string render_svg_string(const std::vector<LabeledSeries>& series);
void render_svg(const std::vector<LabeledSeries>& series, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mecrl::harness
