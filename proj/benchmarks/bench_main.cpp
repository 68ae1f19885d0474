#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>

#include "melscreen/dsift.hpp"
#include "melscreen/haar.hpp"
#include "melscreen/midlevel.hpp"
#include "melscreen/rng.hpp"
#include "melscreen/segmentation.hpp"
#include "melscreen/svm.hpp"

using namespace melscreen;

namespace {

GrayImage noisy_disk_image(int size, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(size, size);
  const double c = (size - 1) / 2.0;
  const double r = 0.3 * size;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool inside = (x - c) * (x - c) + (y - c) * (y - c) <= r * r;
      double v = (inside ? 0.3 : 0.8) + rng.next_normal(0.0, 0.05);
      img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

Eigen::MatrixXd random_matrix(long rows, long cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = rng.next_normal(0, 1);
  }
  return m;
}

void BM_ChanVese128(benchmark::State& state) {
  const GrayImage img = noisy_disk_image(128, 1);
  ChanVeseParams params;
  params.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chan_vese(img, params));
  }
}
BENCHMARK(BM_ChanVese128)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_HaarDescriptor(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> patch(24 * 24);
  for (auto& v : patch) v = rng.next_unit();
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_descriptor(patch, 24, 3));
  }
}
BENCHMARK(BM_HaarDescriptor);

void BM_DenseRootSift(benchmark::State& state) {
  const GrayImage img = noisy_disk_image(static_cast<int>(state.range(0)), 3);
  const DenseSiftSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_dense_rootsift(img, spec));
  }
}
BENCHMARK(BM_DenseRootSift)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const Eigen::MatrixXd sample = random_matrix(2000, 20, 4);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans(sample, k, 20, 5));
  }
}
BENCHMARK(BM_KMeans)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_BossaPyramid(benchmark::State& state) {
  Rng rng(6);
  const Eigen::MatrixXd sample = random_matrix(1024, 64, 7);
  Codebook cb = random_codebook(sample, 256, 8);
  cb.sigma = estimate_sigma(cb, sample);
  const Eigen::MatrixXd descs = sample.topRows(400);
  std::vector<std::pair<int, int>> centers;
  for (int i = 0; i < 400; ++i) {
    centers.emplace_back(static_cast<int>(rng.next_below(128)),
                         static_cast<int>(rng.next_below(128)));
  }
  const BossaParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        spatial_pyramid_encode(descs, centers, cb, params, 128, 128));
  }
}
BENCHMARK(BM_BossaPyramid)->Unit(benchmark::kMillisecond);

void BM_SvmTrain(benchmark::State& state) {
  Rng rng(9);
  const long n = state.range(0);
  Eigen::MatrixXd X(n, 10);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    y[static_cast<std::size_t>(i)] = label;
    for (long j = 0; j < 10; ++j) {
      X(i, j) = label * 0.5 + rng.next_normal(0, 1);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_svc(X, y, 1.0, KernelSpec::rbf(0.1)));
  }
}
BENCHMARK(BM_SvmTrain)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
