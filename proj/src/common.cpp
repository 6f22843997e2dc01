#include "biscat/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace biscat {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::QuadratureNonConverged: return "QuadratureNonConverged";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::AliasedSpectrum: return "AliasedSpectrum";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::SingularAtLambda: return "SingularAtLambda";
    case ErrorKind::NotGMU: return "NotGMU";
    case ErrorKind::ZeroOffset: return "ZeroOffset";
    case ErrorKind::DegenerateMoments: return "DegenerateMoments";
    case ErrorKind::Borderline: return "Borderline";
    case ErrorKind::SingularPotential: return "SingularPotential";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::BNotInvertible: return "BNotInvertible";
    case ErrorKind::SchurSingular: return "SchurSingular";
    case ErrorKind::KernelNotIntegrable: return "KernelNotIntegrable";
    case ErrorKind::MajorantDiverges: return "MajorantDiverges";
    case ErrorKind::UnknownOperator: return "UnknownOperator";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("BISCAT_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{initial_thread_count()};
  return n;
}

}  // namespace

int thread_count() { return thread_setting().load(); }

void set_thread_count(int n) { thread_setting().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace biscat
