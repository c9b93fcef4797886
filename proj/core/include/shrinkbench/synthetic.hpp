#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shrinkbench/dataset.hpp"

namespace shrinkbench {

// Desk-scale stand-in for a real OHLCV corpus: n_tickers tickers with five
// geometric-random-walk series each, of which planted_count are replaced by
// target + gaussian noise (sigma = noise_sigma * target std).
struct SyntheticSpec {
  std::size_t n_rows = 600;
  std::size_t n_tickers = 24;
  std::size_t planted_count = 3;
  double noise_sigma = 0.05;
  std::uint64_t seed = 7;

  void validate() const;
};

// Parses "n_rows=600,n_tickers=24,planted_count=3,noise_sigma=0.05,seed=7";
// missing keys keep their defaults.
SyntheticSpec parse_synthetic_spec(const std::string& text);

struct SyntheticData {
  std::vector<TimeSeries> series;   // ticker-major, fields O,H,L,C,V
  std::vector<std::string> planted_ids;
  std::string target_id;            // always "AAPL.Close"
  SyntheticSpec spec;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes one Yahoo-schema CSV per ticker plus manifest.json (spec, target,
// planted ids) into dir.
void write_synthetic_csvs(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace shrinkbench
