#include "cqed/csvio.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cqed {

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  static const char* kColumns[] = {"P_g0", "P_g",          "P_i",
                                   "P_e",  "n_u",          "n_l",
                                   "flux_u_per_ns", "flux_l_per_ns"};
  std::string out = "time_ns";
  for (auto* c : kColumns) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (Eigen::Index k = 0; k < traj.times_ns.size(); ++k) {
    out += format_sci(traj.times_ns(k));
    for (auto* c : kColumns) {
      out += ',';
      out += format_sci(traj.series.at(c)(k));
    }
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "axis1_name,axis1_value,axis2_name,axis2_value";
  for (const auto& name : sweep.observable_names) {
    out += ',';
    out += name;
  }
  out += ",residual\n";
  const bool two_d = sweep.axes.size() > 1;
  for (const auto& point : sweep.points) {
    out += sweep.axes[0].name;
    out += ',';
    out += format_sci(sweep.axes[0].values(point.i0));
    if (two_d) {
      out += ',';
      out += sweep.axes[1].name;
      out += ',';
      out += format_sci(sweep.axes[1].values(point.i1));
    } else {
      out += ",,";
    }
    for (const auto& name : sweep.observable_names) {
      out += ',';
      const auto it = point.obs.find(name);
      out += format_sci(it == point.obs.end() ? std::nan("") : it->second);
    }
    out += ',';
    out += format_sci(point.residual);
    out += '\n';
  }
  return out;
}

std::string two_time_csv(const TwoTimeGrid& grid) {
  std::string out = "t1_ns,t2_ns,re,im\n";
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      out += format_sci(grid.t1_ns(i));
      out += ',';
      out += format_sci(grid.t2_ns(j));
      out += ',';
      out += format_sci(grid.values(i, j).real());
      out += ',';
      out += format_sci(grid.values(i, j).imag());
      out += '\n';
    }
  }
  return out;
}

std::string spectrum_csv(const Spectrum& spec) {
  std::string out = "omega_MHz,density\n";
  for (Eigen::Index k = 0; k < spec.omega_mhz.size(); ++k) {
    out += format_sci(spec.omega_mhz(k));
    out += ',';
    out += format_sci(spec.density(k));
    out += '\n';
  }
  return out;
}

std::string cross_correlation_csv(const CrossCorrelationResult& cc) {
  std::string out = "tau_ns,coincidence_density_per_ns,baseline_per_ns,normalized\n";
  for (Eigen::Index k = 0; k < cc.tau_ns.size(); ++k) {
    out += format_sci(cc.tau_ns(k));
    out += ',';
    out += format_sci(cc.density(k));
    out += ',';
    out += format_sci(cc.baseline(k));
    out += ',';
    out += format_sci(cc.normalized(k));
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw validation_error("cannot open '" + path + "' for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw validation_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw validation_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 0xF];
  }
  return out;
}

}  // namespace cqed
