// SPDX-License-Identifier: Apache-2.0

#include "mmrt/scene.hpp"

#include "mmrt/errors.hpp"
#include "mmrt/text.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace mmrt {

namespace {

// Reads non-blank, non-comment lines while tracking the physical line number.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    bool next(std::string& line)
    {
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto t = text::trim(line);
            if (t.empty() || t.front() == '#')
                continue;
            line = std::string(t);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

    std::string expect(const char* what)
    {
        std::string line;
        if (!next(line))
            throw ParseError(source_, line_no_, std::string("unexpected end of file, expected ") + what);
        return line;
    }

    double number(std::string_view tok)
    {
        const auto v = text::parse_double(tok);
        if (!v || !std::isfinite(*v))
            fail("invalid number '" + std::string(tok) + "'");
        return *v;
    }

    long long integer(std::string_view tok)
    {
        const auto v = text::parse_int(tok);
        if (!v)
            fail("invalid integer '" + std::string(tok) + "'");
        return *v;
    }

    std::size_t header(const std::string& line, std::string_view keyword)
    {
        const auto f = text::split_ws(line);
        if (f.size() != 2 || f[0] != keyword)
            fail("expected '" + std::string(keyword) + " <count>'");
        const auto n = integer(f[1]);
        if (n < 0)
            fail("negative count");
        return static_cast<std::size_t>(n);
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return in;
}

void write_point(std::ostream& out, const Point3& p)
{
    out << text::format_double(p.x) << ' ' << text::format_double(p.y) << ' ' << text::format_double(p.z);
}

} // namespace

std::vector<std::string> Scene::validate(const Tolerances& tol) const
{
    std::vector<std::string> warnings;
    for (const auto& m : materials) {
        if (!std::isfinite(m.reflection_loss_db))
            throw SceneError("material '" + m.name + "' has a non-finite reflection loss");
        if (m.reflection_loss_db < kMinTypicalReflectionLossDb || m.reflection_loss_db > kMaxTypicalReflectionLossDb)
            warnings.push_back("material '" + m.name + "' reflection loss " + text::format_double(m.reflection_loss_db) +
                               " dB is outside the typical 7..25 dB range");
    }
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const auto& t = triangles[i];
        if (t.id != static_cast<int>(i))
            throw SceneError("triangle ids must be dense 0..N-1 (index " + std::to_string(i) + " has id " +
                             std::to_string(t.id) + ")");
        if (t.material_id < 0 || static_cast<std::size_t>(t.material_id) >= materials.size())
            throw SceneError("triangle " + std::to_string(i) + ": dangling material " + std::to_string(t.material_id) +
                             " of " + std::to_string(materials.size()));
        for (const auto& v : t.vertices)
            if (!is_finite(v))
                throw SceneError("triangle " + std::to_string(i) + " has a non-finite vertex");
        if (!(t.area() > tol.min_triangle_area_m2))
            throw SceneError("triangle " + std::to_string(i) + " is degenerate");
    }
    return warnings;
}

bool operator==(const Scene& a, const Scene& b)
{
    if (a.materials != b.materials || a.triangles.size() != b.triangles.size())
        return false;
    for (std::size_t i = 0; i < a.triangles.size(); ++i) {
        const auto& s = a.triangles[i];
        const auto& t = b.triangles[i];
        if (s.id != t.id || s.material_id != t.material_id || s.vertices != t.vertices)
            return false;
    }
    return true;
}

Trajectory Trajectory::truncated(std::size_t n) const
{
    Trajectory t;
    t.sample_interval_s = sample_interval_s;
    t.positions.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(std::min(n, positions.size())));
    return t;
}

Scene parse_scene(std::istream& in, const std::string& source, const WarningSink& warn)
{
    LineReader r(in, source);
    Scene scene;

    const std::size_t n_mat = r.header(r.expect("'materials N'"), "materials");
    scene.materials.reserve(n_mat);
    for (std::size_t i = 0; i < n_mat; ++i) {
        const auto line = r.expect("material record");
        const auto f = text::split_ws(line);
        if (f.size() != 2)
            r.fail("material record needs 'name loss_db'");
        scene.materials.push_back({std::string(f[0]), r.number(f[1])});
    }

    const std::size_t n_tri = r.header(r.expect("'triangles M'"), "triangles");
    scene.triangles.reserve(n_tri);
    for (std::size_t i = 0; i < n_tri; ++i) {
        const auto line = r.expect("triangle record");
        const auto f = text::split_ws(line);
        if (f.size() != 10)
            r.fail("triangle record needs 9 coordinates and a material index");
        Triangle t;
        for (std::size_t k = 0; k < 3; ++k)
            t.vertices[k] = {r.number(f[3 * k]), r.number(f[3 * k + 1]), r.number(f[3 * k + 2])};
        t.id = static_cast<int>(i);
        const auto mat = r.integer(f[9]);
        if (mat < 0 || static_cast<std::size_t>(mat) >= n_mat)
            r.fail("dangling material " + std::to_string(mat) + " of " + std::to_string(n_mat));
        t.material_id = static_cast<int>(mat);
        if (!(t.area() > Tolerances{}.min_triangle_area_m2))
            r.fail("degenerate triangle");
        scene.triangles.push_back(t);
    }

    std::string extra;
    if (r.next(extra))
        r.fail("unexpected content after triangle records");

    const auto warnings = scene.validate();
    for (const auto& w : warnings) {
        if (warn)
            warn(w);
        else
            std::clog << "warning: " << source << ": " << w << '\n';
    }
    return scene;
}

Scene load_scene(const std::filesystem::path& path, const WarningSink& warn)
{
    auto in = open_in(path);
    Scene s = parse_scene(in, path.string(), warn);
    s.name = path.stem().string();
    return s;
}

void write_scene(std::ostream& out, const Scene& scene)
{
    out << "materials " << scene.materials.size() << '\n';
    for (const auto& m : scene.materials)
        out << m.name << ' ' << text::format_double(m.reflection_loss_db) << '\n';
    out << "triangles " << scene.triangles.size() << '\n';
    for (const auto& t : scene.triangles) {
        for (std::size_t k = 0; k < 3; ++k) {
            write_point(out, t.vertices[k]);
            out << ' ';
        }
        out << t.material_id << '\n';
    }
}

void save_scene(const std::filesystem::path& path, const Scene& scene)
{
    auto out = open_out(path);
    write_scene(out, scene);
}

Trajectory parse_trajectory(std::istream& in, const std::string& source)
{
    LineReader r(in, source);
    Trajectory traj;
    {
        const auto line = r.expect("'dt <seconds>'");
        const auto f = text::split_ws(line);
        if (f.size() != 2 || f[0] != "dt")
            r.fail("expected 'dt <seconds>'");
        traj.sample_interval_s = r.number(f[1]);
        if (!(traj.sample_interval_s > 0.0))
            r.fail("sample interval must be positive");
    }
    std::string line;
    while (r.next(line)) {
        const auto f = text::split_ws(line);
        if (f.size() != 3)
            r.fail("position record needs 'x y z'");
        traj.positions.push_back({r.number(f[0]), r.number(f[1]), r.number(f[2])});
    }
    return traj;
}

Trajectory load_trajectory(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return parse_trajectory(in, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    out << "dt " << text::format_double(traj.sample_interval_s) << '\n';
    for (const auto& p : traj.positions) {
        write_point(out, p);
        out << '\n';
    }
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj)
{
    auto out = open_out(path);
    write_trajectory(out, traj);
}

Point3 load_position(const std::filesystem::path& path)
{
    auto in = open_in(path);
    LineReader r(in, path.string());
    const auto line = r.expect("'x y z'");
    const auto f = text::split_ws(line);
    if (f.size() != 3)
        r.fail("position needs 'x y z'");
    return {r.number(f[0]), r.number(f[1]), r.number(f[2])};
}

void save_position(const std::filesystem::path& path, const Point3& p)
{
    auto out = open_out(path);
    write_point(out, p);
    out << '\n';
}

void add_quad(Scene& scene, const Point3& a, const Point3& b, const Point3& c, const Point3& d, int material_id)
{
    const int base = static_cast<int>(scene.triangles.size());
    scene.triangles.push_back(Triangle{{a, b, c}, base, material_id});
    scene.triangles.push_back(Triangle{{a, c, d}, base + 1, material_id});
}

void add_box(Scene& scene, const Point3& lo, const Point3& hi, int material_id, bool open_top, bool open_bottom)
{
    const Point3 p000{lo.x, lo.y, lo.z}, p100{hi.x, lo.y, lo.z}, p110{hi.x, hi.y, lo.z}, p010{lo.x, hi.y, lo.z};
    const Point3 p001{lo.x, lo.y, hi.z}, p101{hi.x, lo.y, hi.z}, p111{hi.x, hi.y, hi.z}, p011{lo.x, hi.y, hi.z};
    if (!open_bottom)
        add_quad(scene, p000, p100, p110, p010, material_id);
    if (!open_top)
        add_quad(scene, p001, p101, p111, p011, material_id);
    add_quad(scene, p000, p100, p101, p001, material_id); // y = lo
    add_quad(scene, p010, p110, p111, p011, material_id); // y = hi
    add_quad(scene, p000, p010, p011, p001, material_id); // x = lo
    add_quad(scene, p100, p110, p111, p101, material_id); // x = hi
}

} // namespace mmrt
