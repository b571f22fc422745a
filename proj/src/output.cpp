#include "wavezar/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavezar {

namespace {

void write_string(std::ostringstream& os, const std::string& s) {
  // Reuse nlohmann's escaping for strings.
  os << Json(s).dump();
}

void write_value(std::ostringstream& os, const Json& v, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        write_string(os, it.key());
        os << ": ";
        write_value(os, it.value(), depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_value(os, v[i], depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (std::isfinite(x))
        os << format_number(x);
      else
        os << "null";
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& value) {
  std::ostringstream os;
  write_value(os, value, 0);
  os << "\n";
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::string csv_line(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double x : cells) text.push_back(format_number(x));
  return csv_line(text);
}

ArtifactWriter::ArtifactWriter(std::filesystem::path directory) : directory_(std::move(directory)) {}

void ArtifactWriter::stage(const std::string& name, std::string content) {
  for (auto& [n, c] : files_)
    if (n == name) {
      c = std::move(content);
      return;
    }
  files_.emplace_back(name, std::move(content));
}

bool ArtifactWriter::staged(const std::string& name) const {
  for (const auto& f : files_)
    if (f.first == name) return true;
  return false;
}

std::vector<ArtifactRecord> ArtifactWriter::records() const {
  std::vector<ArtifactRecord> out;
  for (const auto& [name, content] : files_) out.push_back({name, fnv1a_hex(content), content.size()});
  return out;
}

void ArtifactWriter::commit() {
  namespace fs = std::filesystem;
  fs::create_directories(directory_);
  std::vector<fs::path> done;
  try {
    for (const auto& [name, content] : files_) {
      const fs::path target = directory_ / name;
      const fs::path temp = directory_ / ("." + name + ".tmp");
      {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + temp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
          out.close();
          fs::remove(temp);
          throw std::runtime_error("short write to " + temp.string());
        }
      }
      fs::rename(temp, target);
      done.push_back(target);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : done) fs::remove(p, ec);
    for (const auto& f : files_) fs::remove(directory_ / ("." + f.first + ".tmp"), ec);
    throw;
  }
}

}  // namespace wavezar
