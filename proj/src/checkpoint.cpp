#include "pinnosc/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <memory>

#include "pinnosc/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace pinnosc {

namespace {

constexpr char kMagic[8] = {'P', 'N', 'O', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

struct File {
    std::FILE* f = nullptr;
    explicit File(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {
        if (!f) throw ArgumentError("checkpoint: cannot open " + path);
    }
    ~File() {
        if (f) std::fclose(f);
    }
};

void put_bytes(std::FILE* f, const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw ArgumentError("checkpoint: short write");
}
void get_bytes(std::FILE* f, void* p, std::size_t n) {
    if (std::fread(p, 1, n, f) != n) throw ArgumentError("checkpoint: short read");
}

void put_u32(std::FILE* f, std::uint32_t v) { put_bytes(f, &v, 4); }
void put_u64(std::FILE* f, std::uint64_t v) { put_bytes(f, &v, 8); }
void put_f64(std::FILE* f, double v) { put_bytes(f, &v, 8); }
std::uint32_t get_u32(std::FILE* f) {
    std::uint32_t v;
    get_bytes(f, &v, 4);
    return v;
}
std::uint64_t get_u64(std::FILE* f) {
    std::uint64_t v;
    get_bytes(f, &v, 8);
    return v;
}
double get_f64(std::FILE* f) {
    double v;
    get_bytes(f, &v, 8);
    return v;
}

void put_string(std::FILE* f, const std::string& s) {
    put_u32(f, static_cast<std::uint32_t>(s.size()));
    put_bytes(f, s.data(), s.size());
}
std::string get_string(std::FILE* f) {
    std::string s(get_u32(f), '\0');
    get_bytes(f, s.data(), s.size());
    return s;
}

void put_array(std::FILE* f, const std::string& name, const Array& a) {
    put_string(f, name);
    put_u32(f, static_cast<std::uint32_t>(a.rank()));
    for (int d : a.shape()) put_u32(f, static_cast<std::uint32_t>(d));
    put_bytes(f, a.data(), a.size() * sizeof(double));
}
Array get_array(std::FILE* f, std::string& name) {
    name = get_string(f);
    std::vector<int> shape(get_u32(f));
    for (auto& d : shape) d = static_cast<int>(get_u32(f));
    Array a(shape);
    get_bytes(f, a.data(), a.size() * sizeof(double));
    return a;
}

void write_header(std::FILE* f, std::uint32_t kind) {
    put_bytes(f, kMagic, sizeof kMagic);
    put_u32(f, kVersion);
    put_u32(f, kind);
}
std::uint32_t read_header(std::FILE* f) {
    char magic[8];
    get_bytes(f, magic, 8);
    for (int i = 0; i < 8; ++i)
        if (magic[i] != kMagic[i]) throw ArgumentError("checkpoint: bad magic");
    if (get_u32(f) != kVersion) throw ArgumentError("checkpoint: unsupported version");
    return get_u32(f);
}

}  // namespace

void save_mlp(const std::string& path, const MlpModel& model) {
    File file(path, "wb");
    write_header(file.f, 0);
    put_u64(file.f, model.seed);
    put_u32(file.f, model.activation == Activation::Tanh ? 0 : 1);
    put_u32(file.f, static_cast<std::uint32_t>(model.widths.size()));
    for (int w : model.widths) put_u32(file.f, static_cast<std::uint32_t>(w));
    put_u32(file.f, static_cast<std::uint32_t>(model.weights.size() * 2));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        put_array(file.f, "w" + std::to_string(l), model.weights[l]);
        put_array(file.f, "b" + std::to_string(l), model.biases[l]);
    }
}

MlpModel load_mlp(const std::string& path) {
    File file(path, "rb");
    if (read_header(file.f) != 0) throw ArgumentError("checkpoint: not an mlp checkpoint");
    MlpModel m;
    m.seed = get_u64(file.f);
    m.activation = get_u32(file.f) == 0 ? Activation::Tanh : Activation::Identity;
    m.widths.resize(get_u32(file.f));
    for (auto& w : m.widths) w = static_cast<int>(get_u32(file.f));
    const std::uint32_t count = get_u32(file.f);
    std::string name;
    for (std::uint32_t i = 0; i < count; ++i) {
        Array a = get_array(file.f, name);
        if (name[0] == 'w')
            m.weights.push_back(std::move(a));
        else
            m.biases.push_back(std::move(a));
    }
    return m;
}

void save_oscillator(const std::string& path, const OscillatorModel& model) {
    File file(path, "wb");
    write_header(file.f, 1);
    const OscillatorConfig& c = model.cfg;
    put_string(file.f, to_string(c.kind));
    put_u32(file.f, static_cast<std::uint32_t>(c.input_size));
    put_u32(file.f, static_cast<std::uint32_t>(c.hidden_size));
    put_f64(file.f, c.delta_t);
    put_f64(file.f, c.gamma);
    put_f64(file.f, c.epsilon);
    put_u32(file.f, c.explicit_damping ? 1 : 0);
    put_f64(file.f, c.learning_rate);
    put_u32(file.f, static_cast<std::uint32_t>(c.epochs));
    put_u64(file.f, c.seed);
    put_u32(file.f, static_cast<std::uint32_t>(model.params.size()));
    for (std::size_t i = 0; i < model.params.size(); ++i)
        put_array(file.f, model.names[i], model.params[i]);
}

OscillatorModel load_oscillator(const std::string& path) {
    File file(path, "rb");
    if (read_header(file.f) != 1)
        throw ArgumentError("checkpoint: not an oscillator checkpoint");
    OscillatorModel m;
    OscillatorConfig c;
    c.kind = cell_kind_from_string(get_string(file.f));
    c.input_size = static_cast<int>(get_u32(file.f));
    c.hidden_size = static_cast<int>(get_u32(file.f));
    c.delta_t = get_f64(file.f);
    c.gamma = get_f64(file.f);
    c.epsilon = get_f64(file.f);
    c.explicit_damping = get_u32(file.f) != 0;
    c.learning_rate = get_f64(file.f);
    c.epochs = static_cast<int>(get_u32(file.f));
    c.seed = get_u64(file.f);
    m.cfg = c;
    const std::uint32_t count = get_u32(file.f);
    std::string name;
    for (std::uint32_t i = 0; i < count; ++i) {
        m.params.push_back(get_array(file.f, name));
        m.names.push_back(name);
    }
    return m;
}

}  // namespace pinnosc
