#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sattree/dataset.hpp"
#include "sattree/inference.hpp"
#include "sattree/tree.hpp"

namespace sattree {

enum class OptimizeMode { kDepth, kSize };

struct ExperimentSpec {
  OptimizeMode mode = OptimizeMode::kDepth;
  std::optional<int> folds;
  std::uint64_t seed = 0;
  std::optional<std::chrono::duration<double>> time_budget;
  CounterexamplePolicy policy = CounterexamplePolicy::kFirstInOrder;
};

struct FoldReport {
  bool failed = false;  // training fold infeasible after the split
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  InferenceReport inference;
};

struct CrossValidationResult {
  double accuracy = 0.0;  // mean over non-failed folds
  std::vector<FoldReport> folds;
};

// Seeded shuffle, folds of size n/k rounded up or down. Each training fold
// is binarized independently and its schema applied to the held-out rows, so
// no threshold or category leaks from the test side. Dont-care predictions
// and labels unseen in training score as wrong.
CrossValidationResult kfold_cross_validate(const RawDataset& raw, const ExperimentSpec& spec);

struct GeneratorSpec {
  int depth = 1;
  int num_features = 1;
  int num_classes = 2;
  std::size_t num_examples = 1;
  std::uint64_t seed = 0;
  // When set, examples are sampled without replacement and the spec fails
  // once 2^f vectors are exhausted; when cleared, draws are independent and
  // n may exceed 2^f (duplicates collapse during validation).
  bool distinct_examples = true;
};

// Draws a random perfect tree (no feature repeats on a root-to-leaf path,
// every class present on some leaf) and n distinct uniform feature vectors
// labelled by that tree. Deterministic for a given seed.
std::pair<BinaryDataset, DecisionTree> generate_random_instance(const GeneratorSpec& spec);

enum class SweepParameter { kDepth, kFeatures, kClasses, kExamples };

struct SweepPoint {
  int value = 0;
  std::size_t completed_runs = 0;  // runs that beat the time budget
  double mean_seconds = 0.0;
  double mean_examples_used = 0.0;
};

// Averages inference time and counterexample count over seeded runs while
// one generator parameter sweeps through `points`. Timed-out runs are left
// out of the means (missing cells).
std::vector<SweepPoint> scaling_sweep(const GeneratorSpec& base, SweepParameter vary,
                                      std::span<const int> points, int runs_per_point,
                                      OptimizeMode mode,
                                      std::optional<std::chrono::duration<double>> budget = {});

std::string sweep_to_csv(std::span<const SweepPoint> table);

// Command line entry point; returns the process exit code.
// 0 success, 2 no tree within the depth cap, 3 timeout, 4 input error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without program name

}  // namespace sattree
