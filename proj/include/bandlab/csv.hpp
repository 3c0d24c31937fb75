#ifndef BANDLAB_CSV_HPP
#define BANDLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace bandlab {

// floats printed with 17 significant digits so files replay bit-exactly
inline std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// CSV file with a resolved-config comment block ahead of the header; the
// block reparses to the exact config that produced the file.
class CsvFile {
  public:
    CsvFile(const std::string& path,
            const std::vector<std::pair<std::string, std::string>>& resolved_config,
            const std::string& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        for (const auto& [key, value] : resolved_config) out_ << "# " << key << "=" << value << "\n";
        out_ << header << "\n";
    }

    void row(const std::string& line) { out_ << line << "\n"; }

  private:
    std::ofstream out_;
};

}  // namespace bandlab

#endif
