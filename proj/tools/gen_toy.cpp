// Regenerates data/toy.csv: four Gaussian traffic blobs (normal, dos, probe,
// exfil) over four numeric features plus a class-correlated protocol column.
// Deterministic; the checked-in file comes from `gen_toy data/toy.csv`.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace {

struct Blob {
  std::string label;
  std::size_t count;
  double center[4];
  // protocol mix: cumulative probabilities for tcp/udp/icmp
  double p_tcp;
  double p_udp;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "data/toy.csv";
  const std::vector<Blob> blobs = {
      {"normal", 480, {0.20, 0.20, 0.30, 0.25}, 0.8, 0.95},
      {"dos", 320, {0.80, 0.70, 0.20, 0.60}, 0.1, 0.9},
      {"probe", 280, {0.30, 0.85, 0.75, 0.40}, 0.1, 0.2},
      {"exfil", 240, {0.75, 0.15, 0.80, 0.85}, 0.9, 0.95},
  };
  constexpr double kSigma = 0.04;

  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  out << "duration,pkt_rate,entropy,byte_ratio,proto,label\n";
  out << std::fixed << std::setprecision(6);

  dualtier::Rng rng(20240501);
  for (const auto& blob : blobs) {
    for (std::size_t i = 0; i < blob.count; ++i) {
      for (double c : blob.center) {
        out << c + kSigma * rng.normal() << ",";
      }
      const double p = rng.real();
      out << (p < blob.p_tcp ? "tcp" : p < blob.p_udp ? "udp" : "icmp");
      out << "," << blob.label << "\n";
    }
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}
