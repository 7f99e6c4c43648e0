// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>

#include "../bsdf/grating.hpp"
#include "../bsdf/harvey_shack.hpp"
#include "../bsdf/lambertian.hpp"
#include "../bsdf/specular.hpp"
#include "scene.hpp"

namespace waveray {

class SceneParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Token {
    enum class Type { Ident, String, Number, LBrace, RBrace, LBracket, RBracket, End };
    Type type = Type::End;
    std::string text;
    Float number = 0;
    int line = 0;
};

class Lexer {
public:
    Lexer(std::string src, std::string origin) : m_src(std::move(src)), m_origin(std::move(origin)) {
        advance();
    }

    const Token &peek() const { return m_tok; }
    Token next() {
        Token t = m_tok;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string &msg, int line) const {
        throw SceneParseError(m_origin + ":" + std::to_string(line) + ": " + msg);
    }
    [[noreturn]] void fail_here(const std::string &msg) const { fail(msg, m_tok.line); }

    Token expect(Token::Type type, const char *what) {
        if (m_tok.type != type) fail_here(std::string("expected ") + what);
        return next();
    }

    std::string expect_string(const char *what) { return expect(Token::Type::String, what).text; }
    Float expect_number(const char *what) { return expect(Token::Type::Number, what).number; }
    std::string expect_ident(const char *what) { return expect(Token::Type::Ident, what).text; }

    const std::string &origin() const { return m_origin; }

private:
    void advance() {
        while (m_pos < m_src.size()) {
            char c = m_src[m_pos];
            if (c == '\n') {
                ++m_line;
                ++m_pos;
            } else if (std::isspace((unsigned char)c)) {
                ++m_pos;
            } else if (c == '#') {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n') ++m_pos;
            } else {
                break;
            }
        }
        m_tok.line = m_line;
        if (m_pos >= m_src.size()) {
            m_tok.type = Token::Type::End;
            return;
        }
        char c = m_src[m_pos];
        auto single = [&](Token::Type t) {
            m_tok.type = t;
            m_tok.text = c;
            ++m_pos;
        };
        if (c == '{') return single(Token::Type::LBrace);
        if (c == '}') return single(Token::Type::RBrace);
        if (c == '[') return single(Token::Type::LBracket);
        if (c == ']') return single(Token::Type::RBracket);
        if (c == '"') {
            std::size_t end = m_src.find('"', m_pos + 1);
            if (end == std::string::npos) fail("unterminated string", m_line);
            m_tok.type = Token::Type::String;
            m_tok.text = m_src.substr(m_pos + 1, end - m_pos - 1);
            m_pos = end + 1;
            return;
        }
        std::size_t start = m_pos;
        while (m_pos < m_src.size() && !std::isspace((unsigned char)m_src[m_pos]) &&
               std::string("{}[]#\"").find(m_src[m_pos]) == std::string::npos)
            ++m_pos;
        std::string word = m_src.substr(start, m_pos - start);
        char *endp = nullptr;
        double v = std::strtod(word.c_str(), &endp);
        if (endp && *endp == '\0' && endp != word.c_str()) {
            m_tok.type = Token::Type::Number;
            m_tok.number = v;
            m_tok.text = word;
        } else {
            m_tok.type = Token::Type::Ident;
            m_tok.text = word;
        }
    }

    std::string m_src, m_origin;
    std::size_t m_pos = 0;
    int m_line = 1;
    Token m_tok;
};

/// Iterate "key ..." entries of a { } block; the handler consumes the value
/// tokens of its key and reports unknown keys with their location.
inline void parse_block(Lexer &lex, const std::function<bool(const std::string &, int)> &handler) {
    lex.expect(Token::Type::LBrace, "'{'");
    for (;;) {
        if (lex.peek().type == Token::Type::RBrace) {
            lex.next();
            return;
        }
        if (lex.peek().type == Token::Type::End) lex.fail_here("unterminated block");
        int line = lex.peek().line;
        std::string key = lex.expect_ident("a key");
        if (!handler(key, line)) lex.fail("unknown key '" + key + "'", line);
    }
}

inline std::vector<Float> parse_number_list(Lexer &lex) {
    lex.expect(Token::Type::LBracket, "'['");
    std::vector<Float> out;
    while (lex.peek().type == Token::Type::Number) out.push_back(lex.next().number);
    lex.expect(Token::Type::RBracket, "']'");
    return out;
}

inline Spectrum parse_spectrum(Lexer &lex, const std::filesystem::path &base) {
    std::string kind = lex.expect_ident("a spectrum kind");
    Float scale = 1;
    auto trailing_scale = [&]() {
        if (lex.peek().type == Token::Type::Ident && lex.peek().text == "scale") {
            lex.next();
            scale = lex.expect_number("a scale value");
        }
    };
    if (kind == "constant") {
        Float v = lex.expect_number("a spectrum value");
        return Spectrum::constant(v);
    }
    if (kind == "blackbody") {
        Float t = lex.expect_number("a temperature in kelvin");
        trailing_scale();
        return Spectrum::blackbody(t, scale);
    }
    if (kind == "file") {
        std::string rel = lex.expect_string("a spectrum file path");
        trailing_scale();
        return load_spectrum((base / rel).string(), scale);
    }
    lex.fail_here("unknown spectrum kind '" + kind + "' (constant|blackbody|file)");
}

inline RefractiveIndex parse_ior_file(const std::string &path) {
    auto raw = load_spectral_rows(path, 2, 3);
    std::vector<std::array<Float, 3>> rows;
    for (auto &r : raw) rows.push_back({r[0], r[1], r.size() > 2 ? r[2] : 0});
    return RefractiveIndex::tabulated(std::move(rows));
}

inline std::shared_ptr<DiffractiveBsdf> parse_material(Lexer &lex,
                                                       const std::filesystem::path &base,
                                                       int line) {
    std::string type;
    Float albedo = 0.5;
    Float ior_a = 1.5, ior_b = 0;
    bool have_tab_ior = false;
    RefractiveIndex tab_ior = RefractiveIndex::constant(1.5);
    MultilayerStack stack;
    GratingSurface grating;
    HarveyShackSurface hs;

    parse_block(lex, [&](const std::string &key, int kline) {
        if (key == "type") {
            type = lex.expect_ident("a material type");
            return true;
        }
        if (key == "albedo") { albedo = lex.expect_number("an albedo"); return true; }
        if (key == "ior") {
            ior_a = lex.expect_number("an index");
            if (lex.peek().type == Token::Type::Number) ior_b = lex.next().number;
            return true;
        }
        if (key == "eta") {
            Float e = lex.expect_number("eta");
            Float k = lex.expect_number("kappa");
            tab_ior = RefractiveIndex::tabulated({{LambdaMin, e, k}, {LambdaMax, e, k}});
            have_tab_ior = true;
            return true;
        }
        if (key == "ior_file" || key == "base_file") {
            tab_ior = parse_ior_file((base / lex.expect_string("a path")).string());
            have_tab_ior = true;
            return true;
        }
        if (key == "ambient") {
            stack.ambient = RefractiveIndex::constant(lex.expect_number("an index"));
            return true;
        }
        if (key == "substrate") {
            stack.substrate = RefractiveIndex::constant(lex.expect_number("an index"));
            return true;
        }
        if (key == "layer") {
            Float th = lex.expect_number("a thickness in meters");
            Float n = lex.expect_number("an index");
            if (th <= 0) lex.fail("layer thickness must be positive", kline);
            stack.layers.push_back({th, RefractiveIndex::constant(n)});
            return true;
        }
        if (key == "profile") {
            std::string p = lex.expect_ident("a profile");
            if (p == "sinusoidal") grating.profile = GratingProfile::Sinusoidal;
            else if (p == "rectangular") grating.profile = GratingProfile::Rectangular;
            else if (p == "triangular") grating.profile = GratingProfile::Triangular;
            else lex.fail("unknown grating profile '" + p + "'", kline);
            return true;
        }
        if (key == "period") {
            grating.period1 = lex.expect_number("a period in meters");
            if (lex.peek().type == Token::Type::Number) grating.period2 = lex.next().number;
            return true;
        }
        if (key == "amplitude") { grating.amplitude = lex.expect_number("a height"); return true; }
        if (key == "orientation") {
            grating.orientation = deg_to_rad(lex.expect_number("an angle in degrees"));
            return true;
        }
        if (key == "sigma_h") { hs.sigma_h = lex.expect_number("a roughness"); return true; }
        if (key == "correlation_length") {
            hs.correlation_length = lex.expect_number("a length");
            return true;
        }
        if (key == "exponent") { hs.falloff_exponent = lex.expect_number("an exponent"); return true; }
        if (key == "psd_amplitude") { hs.psd_amplitude = lex.expect_number("an amplitude"); return true; }
        return false;
    });

    if (type == "lambertian") return std::make_shared<LambertianBsdf>(albedo);
    if (type == "dielectric") {
        return std::make_shared<SmoothDielectricBsdf>(
            have_tab_ior ? tab_ior : RefractiveIndex::cauchy(ior_a, ior_b));
    }
    if (type == "conductor") {
        if (!have_tab_ior)
            throw SceneParseError(lex.origin() + ":" + std::to_string(line) +
                                  ": conductor needs 'eta' or 'ior_file'");
        return std::make_shared<SmoothConductorBsdf>(tab_ior);
    }
    if (type == "multilayer") return std::make_shared<MultilayerBsdf>(stack);
    if (type == "grating") {
        grating.base = have_tab_ior ? tab_ior : RefractiveIndex::cauchy(ior_a, ior_b);
        return std::make_shared<GratingBsdf>(grating);
    }
    if (type == "harvey-shack" || type == "harvey_shack") {
        hs.base = have_tab_ior ? tab_ior : RefractiveIndex::cauchy(ior_a, ior_b);
        return std::make_shared<HarveyShackBsdf>(hs);
    }
    throw SceneParseError(lex.origin() + ":" + std::to_string(line) +
                          ": unknown material type '" + type + "'");
}

inline void load_obj(const std::string &path, TriangleMesh &mesh) {
    std::ifstream in(path);
    if (!in) throw SceneParseError("cannot open obj file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z))
                throw SceneParseError(path + ":" + std::to_string(line_no) + ": bad vertex");
            mesh.positions.push_back(p);
        } else if (tag == "f") {
            std::vector<uint32_t> idx;
            std::string part;
            while (ls >> part) {
                long v = std::strtol(part.c_str(), nullptr, 10);
                if (v == 0)
                    throw SceneParseError(path + ":" + std::to_string(line_no) + ": bad face");
                idx.push_back(v > 0 ? (uint32_t)(v - 1)
                                    : (uint32_t)((long)mesh.positions.size() + v));
            }
            for (std::size_t i = 2; i < idx.size(); ++i) {
                mesh.indices.push_back(idx[0]);
                mesh.indices.push_back(idx[i - 1]);
                mesh.indices.push_back(idx[i]);
            }
        }
        // normals/uvs and other statements are ignored
    }
}

} // namespace detail

/// Load, validate, and finalize a scene description.
/// Diagnostics carry file:line positions; unknown keys are rejected.
inline Scene load_scene(const std::string &path,
                        std::vector<std::string> *warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw SceneParseError("cannot open scene file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    detail::Lexer lex(ss.str(), path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();

    Scene scene;
    std::map<std::string, int> material_index;
    std::map<std::string, int> mesh_index;
    std::map<std::string, int> emitter_index;
    struct PendingHint {
        std::string emitter, via;
        int line;
    };
    std::vector<PendingHint> pending_hints;
    auto warn = [&](const std::string &msg) {
        if (warnings) warnings->push_back(msg);
    };

    while (lex.peek().type != detail::Token::Type::End) {
        int line = lex.peek().line;
        std::string top = lex.expect_ident("a top-level statement");
        if (top == "scene") {
            detail::parse_block(lex, [&](const std::string &key, int) {
                if (key == "min_feature_size") {
                    scene.min_feature_size = lex.expect_number("a length in meters");
                    return true;
                }
                return false;
            });
        } else if (top == "camera") {
            Vec3 target{0, 0, -1};
            bool have_target = false;
            detail::parse_block(lex, [&](const std::string &key, int) {
                auto vec3 = [&]() {
                    Float x = lex.expect_number("x");
                    Float y = lex.expect_number("y");
                    Float z = lex.expect_number("z");
                    return Vec3(x, y, z);
                };
                if (key == "position") { scene.camera.position = vec3(); return true; }
                if (key == "look_at") { target = vec3(); have_target = true; return true; }
                if (key == "up") { scene.camera.up_axis = vec3(); return true; }
                if (key == "fov") { scene.camera.fov_deg = lex.expect_number("degrees"); return true; }
                if (key == "resolution") {
                    scene.camera.width = (int)lex.expect_number("width");
                    scene.camera.height = (int)lex.expect_number("height");
                    return true;
                }
                return false;
            });
            if (have_target) scene.camera.forward = target - scene.camera.position;
        } else if (top == "material") {
            std::string name = lex.expect_string("a material name");
            if (material_index.count(name))
                lex.fail("duplicate material '" + name + "'", line);
            scene.materials.push_back(detail::parse_material(lex, base, line));
            scene.material_names.push_back(name);
            material_index[name] = (int)scene.materials.size() - 1;
        } else if (top == "mesh") {
            std::string name = lex.peek().type == detail::Token::Type::String
                                   ? lex.next().text
                                   : "mesh_" + std::to_string(scene.meshes.size());
            TriangleMesh mesh;
            std::string material_name;
            int material_line = line;
            bool emissive = false;
            Spectrum emission = Spectrum::constant(1);
            Float sourcing_area = 10e-6;
            detail::parse_block(lex, [&](const std::string &key, int kline) {
                if (key == "material") {
                    material_name = lex.expect_string("a material name");
                    material_line = kline;
                    return true;
                }
                if (key == "positions") {
                    auto nums = detail::parse_number_list(lex);
                    if (nums.size() % 3 != 0)
                        lex.fail("positions need 3 numbers per vertex", kline);
                    for (std::size_t i = 0; i < nums.size(); i += 3)
                        mesh.positions.push_back({nums[i], nums[i + 1], nums[i + 2]});
                    return true;
                }
                if (key == "triangles") {
                    auto nums = detail::parse_number_list(lex);
                    if (nums.size() % 3 != 0)
                        lex.fail("triangles need 3 indices per face", kline);
                    for (Float v : nums) {
                        if (v < 0 || v != std::floor(v))
                            lex.fail("triangle indices must be non-negative integers", kline);
                        mesh.indices.push_back((uint32_t)v);
                    }
                    return true;
                }
                if (key == "obj") {
                    detail::load_obj((base / lex.expect_string("an obj path")).string(), mesh);
                    return true;
                }
                if (key == "tangent") {
                    mesh.tangent_angle = deg_to_rad(lex.expect_number("an angle in degrees"));
                    return true;
                }
                if (key == "emission") {
                    emissive = true;
                    detail::parse_block(lex, [&](const std::string &ekey, int) {
                        if (ekey == "spectrum") {
                            emission = detail::parse_spectrum(lex, base);
                            return true;
                        }
                        if (ekey == "sourcing_area") {
                            sourcing_area = lex.expect_number("an area in m^2");
                            return true;
                        }
                        return false;
                    });
                    return true;
                }
                return false;
            });
            for (uint32_t idx : mesh.indices)
                if (idx >= mesh.positions.size())
                    lex.fail("triangle index out of range in mesh '" + name + "'", line);
            if (!material_name.empty()) {
                auto it = material_index.find(material_name);
                if (it == material_index.end())
                    lex.fail("unknown material '" + material_name + "'", material_line);
                mesh.material = it->second;
            } else if (!emissive) {
                lex.fail("mesh '" + name + "' needs a material or an emission block", line);
            }
            if (mesh_index.count(name)) lex.fail("duplicate mesh '" + name + "'", line);
            mesh_index[name] = (int)scene.meshes.size();
            scene.meshes.push_back(std::move(mesh));
            if (emissive) {
                Emitter em;
                em.kind = Emitter::Kind::Area;
                em.name = name;
                em.spectrum = emission;
                em.mesh = (int)scene.meshes.size() - 1;
                em.mesh_area = scene.meshes.back().area();
                if (em.mesh_area <= 0) lex.fail("emissive mesh '" + name + "' has no area", line);
                em.sourcing_area = sourcing_area;
                if (em.sourcing_area > em.mesh_area) {
                    warn(path + ": emitter '" + name + "': sourcing area " +
                         std::to_string(sourcing_area) + " clamped to mesh area " +
                         std::to_string(em.mesh_area));
                    em.sourcing_area = em.mesh_area;
                }
                em.emission = std::make_shared<EmissionSampler>(em.spectrum);
                emitter_index[name] = (int)scene.emitters.size();
                scene.emitters.push_back(std::move(em));
            }
        } else if (top == "emitter") {
            std::string name = lex.expect_string("an emitter name");
            std::string kind = lex.expect_ident("an emitter kind");
            Emitter em;
            em.name = name;
            if (kind == "distant") {
                em.kind = Emitter::Kind::Distant;
                detail::parse_block(lex, [&](const std::string &key, int kline) {
                    if (key == "direction") {
                        Float x = lex.expect_number("x"), y = lex.expect_number("y"),
                              z = lex.expect_number("z");
                        Vec3 d(x, y, z);
                        if (d.norm() <= 0) lex.fail("zero direction", kline);
                        em.travel_direction = d.normalized();
                        return true;
                    }
                    if (key == "solid_angle") {
                        em.solid_angle = lex.expect_number("a solid angle in sr");
                        if (em.solid_angle <= 0)
                            lex.fail("solid angle must be positive (delta sources disallowed)",
                                     kline);
                        return true;
                    }
                    if (key == "spectrum") {
                        em.spectrum = detail::parse_spectrum(lex, base);
                        return true;
                    }
                    return false;
                });
            } else if (kind == "envmap") {
                em.kind = Emitter::Kind::Envmap;
                detail::parse_block(lex, [&](const std::string &key, int) {
                    if (key == "image") {
                        em.envmap = read_pfm((base / lex.expect_string("a pfm path")).string());
                        return true;
                    }
                    if (key == "spectrum") {
                        em.spectrum = detail::parse_spectrum(lex, base);
                        return true;
                    }
                    return false;
                });
                if (em.envmap.width == 0) lex.fail("envmap emitter needs an image", line);
                em.build_env_tables();
            } else {
                lex.fail("unknown emitter kind '" + kind + "' (distant|envmap)", line);
            }
            em.emission = std::make_shared<EmissionSampler>(em.spectrum);
            if (emitter_index.count(name)) lex.fail("duplicate emitter '" + name + "'", line);
            emitter_index[name] = (int)scene.emitters.size();
            scene.emitters.push_back(std::move(em));
        } else if (top == "ms_hint") {
            PendingHint hint;
            hint.line = line;
            detail::parse_block(lex, [&](const std::string &key, int) {
                if (key == "emitter") { hint.emitter = lex.expect_string("an emitter name"); return true; }
                if (key == "via") { hint.via = lex.expect_string("a mesh name"); return true; }
                return false;
            });
            pending_hints.push_back(hint);
        } else {
            lex.fail("unknown statement '" + top + "'", line);
        }
    }

    for (auto &hint : pending_hints) {
        auto ei = emitter_index.find(hint.emitter);
        if (ei == emitter_index.end())
            throw SceneParseError(path + ":" + std::to_string(hint.line) +
                                  ": ms_hint references unknown emitter '" + hint.emitter + "'");
        auto mi = mesh_index.find(hint.via);
        if (mi == mesh_index.end())
            throw SceneParseError(path + ":" + std::to_string(hint.line) +
                                  ": ms_hint references unknown mesh '" + hint.via + "'");
        scene.ms_hints.push_back({ei->second, mi->second});
    }

    if (scene.min_feature_size < 1e-3)
        warn(path + ": declared minimum feature size " +
             std::to_string(scene.min_feature_size) +
             " m is below 1 mm; ray-traced generalized-ray propagation assumes scene "
             "features larger than the coherence scale");

    scene.finalize();
    return scene;
}

} // namespace waveray
