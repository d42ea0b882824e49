#include "encl/io.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

#include "encl/errors.hpp"

namespace encl {

namespace {

class CsvFile {
public:
  CsvFile(const std::string& path, const std::string& hash) {
    f_ = std::fopen(path.c_str(), "w");
    if (f_ == nullptr)
      throw ConfigError("cannot open output file: " + path);
    std::fprintf(f_, "# config %s\n", hash.c_str());
  }
  ~CsvFile() {
    if (f_ != nullptr) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void line(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    va_list args;
    va_start(args, fmt);
    std::vfprintf(f_, fmt, args);
    va_end(args);
    std::fputc('\n', f_);
  }

private:
  std::FILE* f_ = nullptr;
};

const char* guard_label(const GuardReport& g) {
  if (g.ok) return "ok";
  if (g.spatial_warning && g.temporal_warning) return "spatial+temporal";
  return g.spatial_warning ? "spatial" : "temporal";
}

const char* verdict_label(const AsymptoticCheck& c) {
  switch (c.verdict) {
    case Verdict::BoundedAbove: return "bounded-above";
    case Verdict::BoundedBelowPositive: return "bounded-below-positive";
    case Verdict::SlopeMatch: return "slope-match";
    case Verdict::Fail: return "fail";
  }
  return "fail";
}

}  // namespace

std::string config_hash(const std::string& canonical_text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_trace_csv(const std::string& path, const BoundaryTrace& trace,
                     int dim, const std::string& hash) {
  CsvFile f(path, hash);
  if (dim == 2)
    f.line("facet_id,x,y,nx,ny,measure,t,u,f");
  else
    f.line("facet_id,x,y,z,nx,ny,nz,measure,t,u,f");
  const auto n_facets = static_cast<Eigen::Index>(trace.facets.size());
  const int n_times = static_cast<int>(trace.times.size());
  for (Eigen::Index i = 0; i < n_facets; ++i) {
    const auto& fac = trace.facets[static_cast<std::size_t>(i)];
    for (int k = 0; k < n_times; ++k) {
      if (dim == 2)
        f.line("%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
               static_cast<long long>(i), fac.center[0], fac.center[1],
               fac.normal[0], fac.normal[1], fac.measure, trace.times[k],
               trace.u(i, k), trace.f(i, k));
      else
        f.line("%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
               "%.17g",
               static_cast<long long>(i), fac.center[0], fac.center[1],
               fac.center[2], fac.normal[0], fac.normal[1], fac.normal[2],
               fac.measure, trace.times[k], trace.u(i, k), trace.f(i, k));
    }
  }
}

void write_transformed_csv(const std::string& path, const Grid& grid,
                           const std::vector<TransformedTrace>& traces,
                           const std::string& hash) {
  CsvFile f(path, hash);
  f.line("facet_id,tau,w,g");
  const auto n = static_cast<Eigen::Index>(grid.facets().size());
  for (const auto& t : traces)
    for (Eigen::Index i = 0; i < n; ++i)
      f.line("%lld,%.17g,%.17g,%.17g", static_cast<long long>(i), t.tau,
             t.w[i], t.g[i]);
}

void write_indicator_csv(const std::string& path,
                         const std::vector<IndicatorSample>& samples,
                         const std::string& hash) {
  CsvFile f(path, hash);
  f.line("tau,sign,log_abs_I,theorem,guard");
  for (const auto& s : samples)
    f.line("%.17g,%d,%.17g,%s,%s", s.tau, s.sign, s.log_abs,
           s.theorem.c_str(), guard_label(s.guard));
}

void write_asymptotic_csv(const std::string& path,
                          const std::vector<AsymptoticCheck>& checks,
                          const std::string& hash) {
  CsvFile f(path, hash);
  f.line("name,tau,scaled_value,verdict");
  for (const auto& c : checks)
    for (std::size_t i = 0; i < c.taus.size(); ++i)
      f.line("%s,%.17g,%.17g,%s", c.name.c_str(), c.taus[i],
             c.scaled_values[i], verdict_label(c));
}

void write_layer_density_csv(const std::string& path,
                             const LayerDensity& density,
                             const std::string& hash) {
  CsvFile f(path, hash);
  f.line("s,node_x,node_y,psi");
  for (std::size_t i = 0; i < density.nodes.size(); ++i)
    f.line("%zu,%.17g,%.17g,%.17g", i, density.nodes[i][0],
           density.nodes[i][1], density.psi[static_cast<Eigen::Index>(i)]);
}

}  // namespace encl
