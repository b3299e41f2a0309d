#include "rte/artifact_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace rte {

namespace {

constexpr char magic[8] = {'T', 'A', 'R', 'R', 'O', 'M', '1', '\0'};

template <class T>
T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

class Writer {
public:
    template <class T>
    void put(T v)
    {
        v = to_little(v);
        const auto* p = reinterpret_cast<const char*>(&v);
        buffer_.append(p, sizeof(T));
    }
    void put_double(double x) { put(std::bit_cast<std::uint64_t>(x)); }
    void put_bytes(const std::string& s) { buffer_.append(s); }
    const std::string& buffer() const { return buffer_; }

private:
    std::string buffer_;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}
    template <class T>
    T get()
    {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return to_little(v);
    }
    double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }
    std::string get_bytes(std::uint64_t n)
    {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint64_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::uint64_t n) const
    {
        if (n > remaining())
            throw FormatError("artifact truncated at byte " + std::to_string(pos_));
    }
    std::string data_;
    std::size_t pos_ = 0;
};

std::string int_text(long long v)
{
    return std::to_string(v);
}

long long parse_int(const std::string& key, const std::string& s)
{
    long long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw FormatError("metadata " + key + " is not an integer");
    return v;
}

double parse_double_meta(const TensorArchive& a, const std::string& key)
{
    try {
        return parse_exact(a.meta(key));
    } catch (const InvalidArgument&) {
        throw FormatError("metadata " + key + " is not a number");
    }
}

void encode_basis(TensorArchive& a, const std::string& p, const ReducedBasis& b)
{
    a.put(p + "U", b.U);
    a.put(p + "singular_values", b.singular_values);
    a.put(p + "U_rho", b.U_rho);
    a.put(p + "U_iso", b.U_iso);
    for (std::size_t q = 0; q < b.operator_blocks.size(); ++q)
        a.put(p + "A." + std::to_string(q), b.operator_blocks[q]);
    for (std::size_t q = 0; q < b.rhs_blocks.size(); ++q)
        a.put(p + "b." + std::to_string(q), b.rhs_blocks[q]);
    a.put_meta(p + "eps_svd", exact_text(b.eps_svd));
    a.put_meta(p + "num_dofs", int_text(b.num_dofs));
    a.put_meta(p + "num_directions", int_text(b.num_directions));
    a.put_meta(p + "operator_blocks", int_text(static_cast<long long>(b.operator_blocks.size())));
    a.put_meta(p + "rhs_blocks", int_text(static_cast<long long>(b.rhs_blocks.size())));
}

std::shared_ptr<ReducedBasis> decode_basis(const TensorArchive& a, const std::string& p)
{
    auto b = std::make_shared<ReducedBasis>();
    b->U = a.matrix(p + "U");
    b->singular_values = a.vector(p + "singular_values");
    b->U_rho = a.matrix(p + "U_rho");
    b->U_iso = a.matrix(p + "U_iso");
    b->eps_svd = parse_double_meta(a, p + "eps_svd");
    b->num_dofs = static_cast<int>(parse_int(p + "num_dofs", a.meta(p + "num_dofs")));
    b->num_directions = static_cast<int>(parse_int(p + "num_directions", a.meta(p + "num_directions")));
    const long long nq = parse_int(p + "operator_blocks", a.meta(p + "operator_blocks"));
    const long long np = parse_int(p + "rhs_blocks", a.meta(p + "rhs_blocks"));
    if (nq < 0 || np < 0 || b->num_dofs < 0 || b->num_directions < 0)
        throw FormatError("basis " + p + " has negative sizes");
    for (long long q = 0; q < nq; ++q)
        b->operator_blocks.push_back(a.matrix(p + "A." + std::to_string(q)));
    for (long long q = 0; q < np; ++q)
        b->rhs_blocks.push_back(a.vector(p + "b." + std::to_string(q)));

    const Eigen::Index r = b->U.cols();
    const auto fail = [&](const std::string& what) { throw FormatError("basis " + p + ": " + what); };
    if (r > 0 && b->U.rows() != static_cast<Eigen::Index>(b->num_dofs) * b->num_directions)
        fail("U rows differ from num_dofs * num_directions");
    if (b->U_rho.size() && (b->U_rho.rows() != b->num_dofs || b->U_rho.cols() != r))
        fail("U_rho has the wrong shape");
    if (b->U_iso.size() && (b->U_iso.rows() != b->num_dofs || b->U_iso.cols() != r))
        fail("U_iso has the wrong shape");
    for (const Matrix& m : b->operator_blocks)
        if (m.rows() != r || m.cols() != r)
            fail("operator block has the wrong shape");
    for (const Vector& v : b->rhs_blocks)
        if (v.size() != r)
            fail("rhs block has the wrong length");
    return b;
}

// Bases already stored, keyed by object, so shared bases are written once.
using BasisIndex = std::map<const ReducedBasis*, std::string>;

void encode_tar(TensorArchive& a, const std::string& t, const TarArtifact& art, BasisIndex& index)
{
    a.put_meta(t + "mode", to_string(art.mode));
    a.put_meta(t + "policy", to_string(art.policy));
    a.put_meta(t + "eps_pod", exact_text(art.eps_pod));
    a.put_meta(t + "requested_levels", int_text(art.requested_levels));
    a.put_meta(t + "levels", int_text(art.aware_levels()));
    std::string ig;
    if (art.ig_basis) {
        const auto it = index.find(art.ig_basis.get());
        if (it != index.end()) {
            ig = it->second;
        } else {
            ig = t + "ig.";
            encode_basis(a, ig, *art.ig_basis);
            index[art.ig_basis.get()] = ig;
        }
    }
    a.put_meta(t + "ig", ig);
    for (int l = 0; l < art.aware_levels(); ++l)
        encode_basis(a, t + "level." + std::to_string(l + 1) + ".", *art.levels[l]);
    const std::size_t d = art.training.empty() ? 0 : art.training.front().size();
    Matrix training(static_cast<Eigen::Index>(art.training.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < art.training.size(); ++i) {
        if (art.training[i].size() != d)
            throw InvalidArgument("training parameters differ in length");
        for (std::size_t k = 0; k < d; ++k)
            training(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = art.training[i][k];
    }
    a.put(t + "training", training);
    a.put_meta(t + "provenance", int_text(static_cast<long long>(art.provenance.size())));
    for (std::size_t i = 0; i < art.provenance.size(); ++i)
        a.put_meta(t + "provenance." + std::to_string(i), art.provenance[i]);
}

using BasisCache = std::map<std::string, std::shared_ptr<const ReducedBasis>>;

TarArtifact decode_tar(const TensorArchive& a, const std::string& t, BasisCache& cache)
{
    TarArtifact art;
    const std::string& mode = a.meta(t + "mode");
    if (mode == to_string(TarMode::si))
        art.mode = TarMode::si;
    else if (mode == to_string(TarMode::fgmres))
        art.mode = TarMode::fgmres;
    else
        throw FormatError("unknown artifact mode '" + mode + "'");
    const std::string& policy = a.meta(t + "policy");
    if (policy == to_string(InitialGuessPolicy::zero))
        art.policy = InitialGuessPolicy::zero;
    else if (policy == to_string(InitialGuessPolicy::rom))
        art.policy = InitialGuessPolicy::rom;
    else
        throw FormatError("unknown initial-guess policy '" + policy + "'");
    art.eps_pod = parse_double_meta(a, t + "eps_pod");
    art.requested_levels = static_cast<int>(parse_int(t + "requested_levels", a.meta(t + "requested_levels")));
    const long long levels = parse_int(t + "levels", a.meta(t + "levels"));
    if (levels < 0)
        throw FormatError("negative level count");
    const std::string& ig = a.meta(t + "ig");
    if (!ig.empty()) {
        auto it = cache.find(ig);
        if (it == cache.end())
            it = cache.emplace(ig, decode_basis(a, ig)).first;
        art.ig_basis = it->second;
    }
    for (long long l = 0; l < levels; ++l)
        art.levels.push_back(decode_basis(a, t + "level." + std::to_string(l + 1) + "."));
    const Matrix training = a.matrix(t + "training");
    for (Eigen::Index i = 0; i < training.rows(); ++i) {
        Parameter mu(static_cast<std::size_t>(training.cols()));
        for (Eigen::Index k = 0; k < training.cols(); ++k)
            mu[static_cast<std::size_t>(k)] = training(i, k);
        art.training.push_back(std::move(mu));
    }
    const long long lines = parse_int(t + "provenance", a.meta(t + "provenance"));
    for (long long i = 0; i < lines; ++i)
        art.provenance.push_back(a.meta(t + "provenance." + std::to_string(i)));

    const auto check_shape = [&](const ReducedBasis& b) {
        if (art.ig_basis && b.rank() > 0 && art.ig_basis->rank() > 0 && b.U.rows() != art.ig_basis->U.rows())
            throw FormatError("artifact bases have different state sizes");
    };
    for (const auto& b : art.levels)
        check_shape(*b);
    return art;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open artifact " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void require_kind(const TensorArchive& a, const std::string& kind)
{
    if (!a.has_meta("kind") || a.meta("kind") != kind)
        throw FormatError("artifact does not hold a " + kind);
}

} // namespace

void TensorArchive::put(std::string name, const Matrix& m)
{
    Tensor t{std::move(name), {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())}, {}};
    t.data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            t.data.push_back(m(i, j));
    tensors.push_back(std::move(t));
}

void TensorArchive::put(std::string name, const Vector& v)
{
    tensors.push_back({std::move(name), {static_cast<std::uint64_t>(v.size())}, {v.data(), v.data() + v.size()}});
}

void TensorArchive::put_meta(std::string key, std::string value)
{
    if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos
        || value.find('\n') != std::string::npos)
        throw InvalidArgument("metadata entries may not contain newlines, and keys may not contain '='");
    metadata.emplace_back(std::move(key), std::move(value));
}

const Tensor* TensorArchive::find(const std::string& name) const
{
    for (const Tensor& t : tensors)
        if (t.name == name)
            return &t;
    return nullptr;
}

Matrix TensorArchive::matrix(const std::string& name) const
{
    const Tensor* t = find(name);
    if (!t || t->dims.size() != 2)
        throw FormatError("missing matrix " + name);
    Matrix m(static_cast<Eigen::Index>(t->dims[0]), static_cast<Eigen::Index>(t->dims[1]));
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = t->data[k++];
    return m;
}

Vector TensorArchive::vector(const std::string& name) const
{
    const Tensor* t = find(name);
    if (!t || t->dims.size() != 1)
        throw FormatError("missing vector " + name);
    return Eigen::Map<const Vector>(t->data.data(), static_cast<Eigen::Index>(t->dims[0]));
}

const std::string& TensorArchive::meta(const std::string& key) const
{
    for (const auto& [k, v] : metadata)
        if (k == key)
            return v;
    throw FormatError("missing metadata " + key);
}

bool TensorArchive::has_meta(const std::string& key) const
{
    for (const auto& kv : metadata)
        if (kv.first == key)
            return true;
    return false;
}

void write_archive(const TensorArchive& archive, const std::string& path)
{
    Writer w;
    w.put_bytes(std::string(magic, sizeof magic));
    w.put<std::uint8_t>(archive_version);
    w.put<std::uint64_t>(archive.tensors.size());
    for (const Tensor& t : archive.tensors) {
        std::uint64_t count = 1;
        for (std::uint64_t d : t.dims)
            count *= d;
        if (count != t.data.size() || t.dims.size() > 255)
            throw InvalidArgument("tensor " + t.name + " has inconsistent dimensions");
        w.put<std::uint32_t>(static_cast<std::uint32_t>(t.name.size()));
        w.put_bytes(t.name);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dims.size()));
        for (std::uint64_t d : t.dims)
            w.put<std::uint64_t>(d);
        for (double x : t.data)
            w.put_double(x);
    }
    std::string text;
    for (const auto& [k, v] : archive.metadata)
        text += k + "=" + v + "\n";
    w.put<std::uint64_t>(text.size());
    w.put_bytes(text);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InvalidArgument("cannot write artifact " + path);
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out)
        throw InvalidArgument("failed writing artifact " + path);
}

TensorArchive read_archive(const std::string& path)
{
    Reader r(slurp(path));
    if (r.get_bytes(sizeof magic) != std::string(magic, sizeof magic))
        throw FormatError("bad artifact magic in " + path);
    const auto version = r.get<std::uint8_t>();
    if (version != archive_version)
        throw FormatError("unsupported artifact version " + std::to_string(version));
    TensorArchive archive;
    const auto count = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) {
        Tensor t;
        t.name = r.get_bytes(r.get<std::uint32_t>());
        const auto rank = r.get<std::uint8_t>();
        std::uint64_t size = 1;
        for (int k = 0; k < rank; ++k) {
            t.dims.push_back(r.get<std::uint64_t>());
            if (t.dims.back() && size > r.remaining() / t.dims.back())
                throw FormatError("tensor " + t.name + " exceeds the file size");
            size *= t.dims.back();
        }
        if (size > r.remaining() / sizeof(double))
            throw FormatError("artifact truncated inside tensor " + t.name);
        t.data.resize(size);
        for (double& x : t.data)
            x = r.get_double();
        archive.tensors.push_back(std::move(t));
    }
    const std::string text = r.get_bytes(r.get<std::uint64_t>());
    if (r.remaining() != 0)
        throw FormatError("trailing bytes after artifact metadata");
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("malformed metadata line '" + line + "'");
        archive.metadata.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return archive;
}

std::string exact_text(double x)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
    return std::string(buf, end);
}

double parse_exact(const std::string& text)
{
    double x = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x, std::chars_format::hex);
    if (ec != std::errc() || end != text.data() + text.size())
        throw InvalidArgument("not an exact number: '" + text + "'");
    return x;
}

void save_artifact(const TarArtifact& artifact, const std::string& path)
{
    TensorArchive a;
    a.put_meta("kind", "tar_artifact");
    BasisIndex index;
    encode_tar(a, "tar.", artifact, index);
    write_archive(a, path);
}

TarArtifact load_artifact(const std::string& path)
{
    const TensorArchive a = read_archive(path);
    require_kind(a, "tar_artifact");
    BasisCache cache;
    return decode_tar(a, "tar.", cache);
}

void save_bundle(const OfflineBundle& bundle, const std::string& path)
{
    TensorArchive a;
    a.put_meta("kind", "offline_bundle");
    BasisIndex index;
    a.put_meta("has.si", bundle.tar_si ? "1" : "0");
    a.put_meta("has.fgmres", bundle.tar_fgmres ? "1" : "0");
    a.put_meta("has.romsad", bundle.romsad ? "1" : "0");
    a.put_meta("has.ig", bundle.ig ? "1" : "0");
    if (bundle.ig) {
        encode_basis(a, "ig.", *bundle.ig);
        index[bundle.ig.get()] = "ig.";
    }
    if (bundle.tar_si)
        encode_tar(a, "si.", *bundle.tar_si, index);
    if (bundle.tar_fgmres)
        encode_tar(a, "fgmres.", *bundle.tar_fgmres, index);
    if (bundle.romsad) {
        encode_basis(a, "romsad.", *bundle.romsad);
        a.put_meta("romsad.window", int_text(bundle.romsad_config.window));
        a.put_meta("romsad.switch", int_text(bundle.romsad_config.switch_iteration));
        a.put_meta("romsad.tol", exact_text(bundle.romsad_config.tolerance));
    }
    for (const auto& [k, v] : bundle.metadata)
        a.put_meta("info." + k, v);
    write_archive(a, path);
}

OfflineBundle load_bundle(const std::string& path)
{
    const TensorArchive a = read_archive(path);
    require_kind(a, "offline_bundle");
    OfflineBundle b;
    BasisCache cache;
    if (a.meta("has.ig") == "1") {
        b.ig = decode_basis(a, "ig.");
        cache["ig."] = b.ig;
    }
    if (a.meta("has.si") == "1")
        b.tar_si = decode_tar(a, "si.", cache);
    if (a.meta("has.fgmres") == "1")
        b.tar_fgmres = decode_tar(a, "fgmres.", cache);
    if (a.meta("has.romsad") == "1") {
        b.romsad = decode_basis(a, "romsad.");
        b.romsad_config.window = static_cast<int>(parse_int("romsad.window", a.meta("romsad.window")));
        b.romsad_config.switch_iteration = static_cast<int>(parse_int("romsad.switch", a.meta("romsad.switch")));
        b.romsad_config.tolerance = parse_double_meta(a, "romsad.tol");
    }
    for (const auto& [k, v] : a.metadata)
        if (k.rfind("info.", 0) == 0)
            b.metadata.emplace_back(k.substr(5), v);
    return b;
}

} // namespace rte
