#include "shrinkbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/rng.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

namespace {

const char* kFields[5] = {"Open", "High", "Low", "Close", "Volume"};

std::string ticker_name(std::size_t i) {
  if (i == 0) return "AAPL";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "SYN%03zu", i);
  return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_rows < 30) throw ValidationError("synthetic: n_rows must be >= 30");
  if (n_tickers < 1) throw ValidationError("synthetic: n_tickers must be >= 1");
  if (planted_count >= 5 * n_tickers) {
    throw ValidationError("synthetic: planted_count must be < 5 * n_tickers");
  }
  if (noise_sigma < 0.0) throw ValidationError("synthetic: noise_sigma must be >= 0");
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec spec;
  std::string rest = text;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string item = rest.substr(0, comma);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw UsageError("synthetic spec: expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "n_rows") {
        spec.n_rows = std::stoul(value);
      } else if (key == "n_tickers") {
        spec.n_tickers = std::stoul(value);
      } else if (key == "planted_count") {
        spec.planted_count = std::stoul(value);
      } else if (key == "noise_sigma") {
        spec.noise_sigma = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else {
        throw UsageError("synthetic spec: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("synthetic spec: bad value for '" + key + "': '" + value + "'");
    } catch (const std::out_of_range&) {
      throw UsageError("synthetic spec: value out of range for '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();

  std::vector<CalendarDate> dates;
  dates.reserve(spec.n_rows);
  CalendarDate d{2016, 1, 4};
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    dates.push_back(d);
    d = d.next_day();
  }

  // One independent stream per series, so the walks do not depend on how many
  // series get planted over afterwards.
  const std::size_t n_series = 5 * spec.n_tickers;
  std::vector<std::vector<double>> values(n_series);
  for (std::size_t s = 0; s < n_series; ++s) {
    SplitMix64 rng(derive_seed(spec.seed, fnv1a64("walk"), static_cast<std::uint64_t>(s)));
    const bool is_volume = s % 5 == 4;
    const double start = is_volume ? 1e6 * (1.0 + 99.0 * rng.next_double())
                                   : 20.0 + 180.0 * rng.next_double();
    const double vol = 0.005 + 0.025 * rng.next_double();
    const double drift = -0.0005 + 0.0015 * rng.next_double();
    std::vector<double>& v = values[s];
    v.reserve(spec.n_rows);
    double price = start;
    for (std::size_t t = 0; t < spec.n_rows; ++t) {
      v.push_back(price);
      price *= std::exp(drift + vol * rng.next_gaussian());
    }
  }

  // Plant target + noise over other companies' series first, then over the
  // target ticker's remaining fields if the spec asks for more.
  const std::size_t target_index = 3;  // AAPL.Close
  std::vector<std::size_t> candidates;
  candidates.reserve(n_series);
  for (std::size_t s = 5; s < n_series; ++s) candidates.push_back(s);
  for (std::size_t s = 0; s < 5; ++s) {
    if (s != target_index) candidates.push_back(s);
  }

  const std::vector<double>& target = values[target_index];
  const double target_std = sample_std(target);
  SyntheticData data;
  data.spec = spec;
  for (std::size_t p = 0; p < spec.planted_count; ++p) {
    const std::size_t s = candidates[p];
    SplitMix64 rng(derive_seed(spec.seed, fnv1a64("planted"), static_cast<std::uint64_t>(p)));
    for (std::size_t t = 0; t < spec.n_rows; ++t) {
      values[s][t] = target[t] + spec.noise_sigma * target_std * rng.next_gaussian();
    }
  }

  for (std::size_t s = 0; s < n_series; ++s) {
    const std::string id = ticker_name(s / 5) + "." + kFields[s % 5];
    data.series.emplace_back(id, dates, std::move(values[s]));
  }
  for (std::size_t p = 0; p < spec.planted_count; ++p) {
    data.planted_ids.push_back(data.series[candidates[p]].id());
  }
  data.target_id = "AAPL.Close";
  return data;
}

void write_synthetic_csvs(const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t n_tickers = data.series.size() / 5;
  for (std::size_t i = 0; i < n_tickers; ++i) {
    const std::string ticker = ticker_name(i);
    const std::filesystem::path path = dir / (ticker + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "Date,Open,High,Low,Close,Volume\n";
    const std::size_t n = data.series[i * 5].size();
    char buf[32];
    for (std::size_t t = 0; t < n; ++t) {
      out << data.series[i * 5].dates()[t].to_string();
      for (std::size_t f = 0; f < 5; ++f) {
        std::snprintf(buf, sizeof(buf), ",%.6f", data.series[i * 5 + f].values()[t]);
        out << buf;
      }
      out << '\n';
    }
  }

  nlohmann::json manifest;
  manifest["n_rows"] = data.spec.n_rows;
  manifest["n_tickers"] = data.spec.n_tickers;
  manifest["planted_count"] = data.spec.planted_count;
  manifest["noise_sigma"] = data.spec.noise_sigma;
  manifest["seed"] = data.spec.seed;
  manifest["target_id"] = data.target_id;
  manifest["planted_ids"] = data.planted_ids;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace shrinkbench
