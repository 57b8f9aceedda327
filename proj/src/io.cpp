#include "nlsw/io.hpp"

#include "nlsw/error.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nlsw {

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string cell(double x) { return format_double(x); }
std::string cell(long x) { return std::to_string(x); }

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t'))
        ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc())
        throw InvalidField("cannot parse number '" + s + "'");
    return v;
}

template <class T>
void put_le(std::ostream& out, T value)
{
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& in)
{
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), 8);
    if (!in)
        throw InvalidField("binary field record is truncated");
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

} // namespace

void write_field_csv(const Field& u, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "x,value\n";
    for (Eigen::Index i = 0; i < u.size(); ++i)
        out << format_double(u.grid().x(i)) << ',' << format_double(u[i]) << '\n';
}

Field read_field_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidField("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InvalidField("malformed field row '" + line + "'");
        xs.push_back(parse_double(line.substr(0, comma)));
        vs.push_back(parse_double(line.substr(comma + 1)));
    }
    if (xs.size() < 2)
        throw InvalidField("field file " + path.string() + " has too few rows");
    const GridSpec g(-xs.front(), static_cast<int>(xs.size()));
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    return Field(g, std::move(v));
}

void write_field_binary(const Field& u, const std::filesystem::path& path)
{
    auto out = open_out(path, true);
    put_le<double>(out, u.grid().L);
    put_le<std::int64_t>(out, u.grid().M);
    for (Eigen::Index i = 0; i < u.size(); ++i)
        put_le<double>(out, u[i]);
}

Field read_field_binary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidField("cannot open " + path.string());
    const double L = get_le<double>(in);
    const auto M = get_le<std::int64_t>(in);
    if (M < 0 || M > (1 << 26))
        throw InvalidField("binary field record has an implausible size");
    const GridSpec g(L, static_cast<int>(M));
    Eigen::VectorXd v(M);
    for (std::int64_t i = 0; i < M; ++i)
        v[i] = get_le<double>(in);
    return Field(g, std::move(v));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(const std::vector<std::string>& row)
{
    if (row.size() != header_.size())
        throw Error("csv row has " + std::to_string(row.size()) + " cells, header has " +
                    std::to_string(header_.size()));
    rows_.push_back(row);
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i)
            os << (i ? "," : "") << r[i];
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_)
        line(r);
    return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const
{
    auto out = open_out(path);
    out << str();
}

void write_trajectory_csv(const TrajectoryRecord& traj, const std::filesystem::path& path)
{
    CsvTable t({"t", "mass", "energy", "orbit_distance"});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        t.add({cell(traj.times[i]), cell(traj.mass[i]), cell(traj.energy[i]),
               i < traj.orbit_distance.size() ? cell(traj.orbit_distance[i]) : std::string()});
    t.write(path);
}

nlohmann::json to_json(const GridSpec& g) { return {{"L", g.L}, {"M", g.M}}; }

nlohmann::json to_json(const ConstrainedCriticalPoint& pt, const SampledPotential& V, const Nonlinearity& f)
{
    return {{"lambda", pt.lambda},
            {"mass", pt.mass},
            {"residual", pt.l2_residual_norm},
            {"constraint_violation", pt.constraint_violation},
            {"energy", energy_unshifted(pt.u, V, f)},
            {"iterations", pt.iterations},
            {"gauge_shift", V.gauge()},
            {"min_value", pt.u.min()},
            {"grid", to_json(pt.u.grid())}};
}

namespace {

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

} // namespace

nlohmann::json to_json(const SpectralReport& rep)
{
    return {{"m", rep.m},
            {"m_f", rep.m_f},
            {"z_dot_u", finite_or_null(rep.z_dot_u)},
            {"spectral_gap", rep.spectral_gap},
            {"classification", to_string(rep.classification)},
            {"eigenvalues_near_zero", rep.eigenvalues_near_zero},
            {"constrained_near_zero", rep.constrained_near_zero},
            {"tau0", rep.tau0},
            {"form_on_u", rep.form_on_u},
            {"sign_definite", rep.sign_definite},
            {"consistent", rep.consistent}};
}

nlohmann::json to_json(const ShadowingReport& rep)
{
    return {{"residual_norm", rep.residual_norm}, {"sigma_min", rep.sigma_min},
            {"inverse_norm", finite_or_null(rep.inverse_norm)}, {"lipschitz", rep.lipschitz},
            {"delta", rep.delta}, {"q", rep.q}, {"samples", rep.samples},
            {"sigma_converged", rep.sigma_converged}, {"invertible", rep.invertible},
            {"condition_ii", rep.condition_ii}, {"condition_iii", rep.condition_iii},
            {"heuristic", true}};
}

nlohmann::json to_json(const InstabilityResult& res)
{
    return {{"rho", res.rho}, {"mu", res.mu}, {"beta", res.beta}, {"block_residual", res.block_residual},
            {"l2_phi_residual", res.l2_phi_residual}, {"orthogonality", res.orthogonality}};
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace nlsw
