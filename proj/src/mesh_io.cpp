#include "bodyfield/mesh.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bodyfield {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& where,
                       const std::string& what) {
    throw ParseError(path.string() + ":" + where + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open mesh file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TriMesh build(const std::filesystem::path& path, std::vector<Vec3> v, std::vector<Face> f) {
    try {
        return TriMesh(std::move(v), std::move(f));
    } catch (const GeometryError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- OBJ

TriMesh parse_obj(const std::filesystem::path& path, const std::string& text) {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<long> poly;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = std::to_string(line_no);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) fail(path, where, "malformed vertex record");
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            poly.clear();
            std::string token;
            while (ls >> token) {
                const std::string head = token.substr(0, token.find('/'));
                long idx = 0;
                const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
                if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
                    fail(path, where, "malformed face index '" + token + "'");
                if (idx < 0) idx += static_cast<long>(vertices.size()) + 1;
                if (idx < 1 || idx > static_cast<long>(vertices.size()))
                    fail(path, where,
                         "face index " + head + " out of range (" +
                             std::to_string(vertices.size()) + " vertices defined so far)");
                poly.push_back(idx - 1);
            }
            if (poly.size() < 3) fail(path, where, "face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
                faces.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
                                 static_cast<std::uint32_t>(poly[k + 1])});
        }
    }
    return build(path, std::move(vertices), std::move(faces));
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(const std::string& name) {
    if (name == "char" || name == "int8") return PlyType::Int8;
    if (name == "uchar" || name == "uint8") return PlyType::UInt8;
    if (name == "short" || name == "int16") return PlyType::Int16;
    if (name == "ushort" || name == "uint16") return PlyType::UInt16;
    if (name == "int" || name == "int32") return PlyType::Int32;
    if (name == "uint" || name == "uint32") return PlyType::UInt32;
    if (name == "float" || name == "float32") return PlyType::Float32;
    if (name == "double" || name == "float64") return PlyType::Float64;
    return std::nullopt;
}

std::size_t ply_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8: return 1;
        case PlyType::Int16:
        case PlyType::UInt16: return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32: return 4;
        case PlyType::Float64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

template <typename T>
T load_le(const char* p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
    return value;
}

double decode(PlyType t, const char* p) {
    switch (t) {
        case PlyType::Int8: return load_le<std::int8_t>(p);
        case PlyType::UInt8: return load_le<std::uint8_t>(p);
        case PlyType::Int16: return load_le<std::int16_t>(p);
        case PlyType::UInt16: return load_le<std::uint16_t>(p);
        case PlyType::Int32: return load_le<std::int32_t>(p);
        case PlyType::UInt32: return load_le<std::uint32_t>(p);
        case PlyType::Float32: return load_le<float>(p);
        case PlyType::Float64: return load_le<double>(p);
    }
    return 0.0;
}

// Reads scalar values one at a time from either the ascii body or the binary body.
class PlyReader {
public:
    PlyReader(const std::filesystem::path& path, const std::string& text, std::size_t offset,
              bool binary)
        : path_(path), text_(text), pos_(offset), binary_(binary) {}

    double next(PlyType t) {
        if (binary_) {
            const std::size_t n = ply_size(t);
            if (pos_ + n > text_.size()) fail(path_, "offset " + std::to_string(pos_), "unexpected end of binary data");
            const double v = decode(t, text_.data() + pos_);
            pos_ += n;
            return v;
        }
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail(path_, "body line " + std::to_string(line_), "unexpected end of ascii data");
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_)
            fail(path_, "body line " + std::to_string(line_),
                 "malformed number '" + text_.substr(start, pos_ - start) + "'");
        return v;
    }

    std::string where() const {
        return binary_ ? "offset " + std::to_string(pos_) : "body line " + std::to_string(line_);
    }

private:
    const std::filesystem::path& path_;
    const std::string& text_;
    std::size_t pos_;
    bool binary_;
    std::size_t line_ = 1;
};

TriMesh parse_ply(const std::filesystem::path& path, const std::string& text) {
    const std::string end_tag = "end_header";
    const std::size_t end = text.find(end_tag);
    if (end == std::string::npos) fail(path, "header", "missing end_header");
    std::size_t body = text.find('\n', end);
    if (body == std::string::npos) fail(path, "header", "missing newline after end_header");
    ++body;

    std::istringstream header(text.substr(0, end));
    std::string line;
    std::size_t line_no = 0;
    bool binary = false;
    std::vector<PlyElement> elements;
    while (std::getline(header, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        const std::string where = std::to_string(line_no);
        if (line_no == 1) {
            if (tag != "ply") fail(path, where, "not a PLY file");
            continue;
        }
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else fail(path, where, "unsupported PLY format '" + fmt + "'");
        } else if (tag == "element") {
            PlyElement e;
            if (!(ls >> e.name >> e.count)) fail(path, where, "malformed element line");
            elements.push_back(std::move(e));
        } else if (tag == "property") {
            if (elements.empty()) fail(path, where, "property before element");
            PlyProperty p;
            std::string type;
            ls >> type;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> p.name;
                auto ct = ply_type(count_type);
                auto it = ply_type(item_type);
                if (!ct || !it) fail(path, where, "unknown list property type");
                p.is_list = true;
                p.count_type = *ct;
                p.type = *it;
            } else {
                auto t = ply_type(type);
                if (!t) fail(path, where, "unknown property type '" + type + "'");
                p.type = *t;
                ls >> p.name;
            }
            elements.back().properties.push_back(std::move(p));
        }
    }

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    PlyReader reader(path, text, body, binary);
    for (const PlyElement& e : elements) {
        const bool is_vertex = e.name == "vertex";
        const bool is_face = e.name == "face";
        for (std::size_t i = 0; i < e.count; ++i) {
            Vec3 v = Vec3::Zero();
            for (const PlyProperty& p : e.properties) {
                if (p.is_list) {
                    const std::string where = reader.where();
                    const auto n = static_cast<std::size_t>(reader.next(p.count_type));
                    std::vector<long> idx(n);
                    for (auto& k : idx) k = static_cast<long>(reader.next(p.type));
                    if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
                        if (n < 3) fail(path, where, "face with fewer than 3 vertices");
                        for (long k : idx)
                            if (k < 0 || k >= static_cast<long>(vertices.size()))
                                fail(path, where,
                                     "face index " + std::to_string(k) + " out of range (" +
                                         std::to_string(vertices.size()) + " vertices)");
                        for (std::size_t k = 1; k + 1 < n; ++k)
                            faces.push_back({static_cast<std::uint32_t>(idx[0]),
                                             static_cast<std::uint32_t>(idx[k]),
                                             static_cast<std::uint32_t>(idx[k + 1])});
                    }
                } else {
                    const double value = reader.next(p.type);
                    if (is_vertex) {
                        if (p.name == "x") v.x() = value;
                        else if (p.name == "y") v.y() = value;
                        else if (p.name == "z") v.z() = value;
                    }
                }
            }
            if (is_vertex) vertices.push_back(v);
        }
    }
    return build(path, std::move(vertices), std::move(faces));
}

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::string ext = lower_extension(path);
    if (ext == ".obj") return parse_obj(path, text);
    if (ext == ".ply" || text.rfind("ply", 0) == 0) return parse_ply(path, text);
    throw ParseError(path.string() + ": unsupported mesh extension '" + ext + "'");
}

TriMesh load_mesh_pair(const std::filesystem::path& path, const std::filesystem::path& canonical_path) {
    return load_mesh(path).with_canonical(load_mesh(canonical_path));
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17);
    for (const Vec3& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace bodyfield
