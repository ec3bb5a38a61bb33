#include "igo/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "igo/errors.hpp"

namespace igo {

namespace {

constexpr const char* kMagic = "igockpt 1";

void write_double_le(std::ostream& os, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char raw[8];
    for (int i = 0; i < 8; ++i) {
        raw[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    }
    os.write(reinterpret_cast<const char*>(raw), 8);
}

double read_double_le(std::istream& is) {
    unsigned char raw[8];
    is.read(reinterpret_cast<char*>(raw), 8);
    if (!is) throw CheckpointError("truncated tensor data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
    }
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<const Param*>& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CheckpointError("cannot open '" + path + "' for writing");
    os << kMagic << "\n";
    os << "params " << params.size() << "\n";
    for (const Param* p : params) {
        if (p->name.empty() || p->name.find_first_of(" \n\t") != std::string::npos) {
            throw CheckpointError("parameter name '" + p->name +
                                  "' is empty or contains whitespace");
        }
        os << "tensor " << p->name << " " << p->value.shape.size();
        for (std::size_t d : p->value.shape) os << " " << d;
        os << "\n";
    }
    os << "data\n";
    for (const Param* p : params) {
        for (double v : p->value.data) write_double_le(os, v);
    }
    if (!os) throw CheckpointError("write failed for '" + path + "'");
}

void load_checkpoint(const std::string& path,
                     const std::vector<Param*>& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(is, line) || line != kMagic) {
        throw CheckpointError("'" + path + "' is not a checkpoint file");
    }
    if (!std::getline(is, line)) throw CheckpointError("missing params line");
    std::size_t count = 0;
    {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag >> count) || tag != "params") {
            throw CheckpointError("bad params line '" + line + "'");
        }
    }
    if (count != params.size()) {
        throw CheckpointError("file holds " + std::to_string(count) +
                              " tensors, model has " +
                              std::to_string(params.size()));
    }
    for (Param* p : params) {
        if (!std::getline(is, line)) throw CheckpointError("missing tensor line");
        std::istringstream ls(line);
        std::string tag, name;
        std::size_t rank = 0;
        if (!(ls >> tag >> name >> rank) || tag != "tensor") {
            throw CheckpointError("bad tensor line '" + line + "'");
        }
        std::vector<std::size_t> shape(rank);
        for (std::size_t& d : shape) {
            if (!(ls >> d)) throw CheckpointError("bad shape in '" + line + "'");
        }
        if (name != p->name) {
            throw CheckpointError("tensor '" + name + "' does not match model parameter '" +
                                  p->name + "'");
        }
        if (shape != p->value.shape) {
            throw CheckpointError("shape mismatch for '" + name + "'");
        }
    }
    if (!std::getline(is, line) || line != "data") {
        throw CheckpointError("missing data marker");
    }
    for (Param* p : params) {
        for (double& v : p->value.data) v = read_double_le(is);
        p->bump();
    }
    // Trailing bytes indicate a writer/reader disagreement.
    char extra = 0;
    if (is.read(&extra, 1)) {
        throw CheckpointError("trailing bytes after tensor data");
    }
}

}  // namespace igo
