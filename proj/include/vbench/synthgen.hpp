#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vbench/dataset.hpp"
#include "vbench/image.hpp"
#include "vbench/noise.hpp"
#include "vbench/panchro.hpp"
#include "vbench/parallel.hpp"
#include "vbench/png_io.hpp"
#include "vbench/rng.hpp"

namespace vbench {

// Full parameterization of one synthetic render. Everything the renderer
// does is a pure function of these fields plus the render constants.
struct SceneParams {
    int vessel_class = 0;            // index into kClassNames
    double sun_elevation_deg = 45.0; // [15, 90]
    double sun_azimuth_deg = 0.0;    // [0, 360)
    double sensor_off_nadir_deg = 0.0; // [0, 45]
    double sensor_azimuth_deg = 0.0;   // [0, 360)
    int sea_state = 0;               // 0-5
    bool wake = false;
    bool secondary_vessel = false;
    bool fenders = false;
    double hull_scale = 1.0;         // [0.8, 1.2]
    std::uint64_t seed = 0;

    void validate() const {
        if (vessel_class < 0 || vessel_class >= kClassCount)
            throw std::invalid_argument("SceneParams: bad vessel class");
        if (sun_elevation_deg < 15.0 || sun_elevation_deg > 90.0)
            throw std::invalid_argument("SceneParams: sun_elevation outside [15,90]");
        if (sun_azimuth_deg < 0.0 || sun_azimuth_deg >= 360.0)
            throw std::invalid_argument("SceneParams: sun_azimuth outside [0,360)");
        if (sensor_off_nadir_deg < 0.0 || sensor_off_nadir_deg > 45.0)
            throw std::invalid_argument("SceneParams: off_nadir outside [0,45]");
        if (sensor_azimuth_deg < 0.0 || sensor_azimuth_deg >= 360.0)
            throw std::invalid_argument("SceneParams: sensor_azimuth outside [0,360)");
        if (sea_state < 0 || sea_state > 5)
            throw std::invalid_argument("SceneParams: sea_state outside 0-5");
        if (hull_scale < 0.8 || hull_scale > 1.2)
            throw std::invalid_argument("SceneParams: hull_scale outside [0.8,1.2]");
    }
};

enum class DeckPattern { container_stacks, hatch_rows, pipeline_spine, flat_deck };

struct VesselTemplate {
    int cls = 0;
    double length_beam_ratio = 5.0;
    DeckPattern deck_pattern = DeckPattern::flat_deck;
    double base_albedo = 0.5;
    double superstructure_position = -1.0; // fraction of length from stern; <0 = none
};

inline const std::array<VesselTemplate, kClassCount>& default_templates() {
    static const std::array<VesselTemplate, kClassCount> t{{
        {0, 3.0, DeckPattern::flat_deck, 0.55, -1.0},        // barge
        {1, 5.4, DeckPattern::hatch_rows, 0.62, 0.86},       // cargo
        {2, 6.6, DeckPattern::container_stacks, 0.58, 0.90}, // container
        {3, 5.9, DeckPattern::pipeline_spine, 0.52, 0.84},   // tanker
    }};
    return t;
}

// Free constants of the renderer, versioned and JSON-loadable so a dataset's
// exact recipe can be pinned and hashed into its manifest.
struct RenderConstants {
    int version = 1;
    // sea
    std::array<double, 3> sea_base{0.16, 0.22, 0.31};
    double sea_noise_amp = 0.09;
    double sea_freq = 0.055;   // base spatial frequency, cycles per pixel
    double sea_aniso = 0.45;   // y-frequency multiplier: elongated wave bands
    int sea_octaves = 4;
    // hull and lighting
    double hull_fill = 0.66;   // hull length as fraction of chip size at hull_scale 1
    double albedo_offset = 0.0;
    double hull_height = 3.5;  // virtual height in pixels, drives shadow length
    double shadow_strength = 0.5;
    double illum_floor = 0.45; // ambient fraction of Lambertian shading
    // deck pattern contrasts
    double container_brightness = 0.30;
    double hatch_darkness = 0.17;
    double pipeline_brightness = 0.24;
    double superstructure_brightness = 0.30;
    double deck_texture_amp = 0.04;
    // modifiers
    double wake_brightness = 0.20;
    double wake_length = 0.55; // fraction of hull length
    double fender_darkness = 0.25;
    std::uint64_t noise_salt = 0x5eaf00dULL;
    PanchroParams panchro;
};

inline void to_json(nlohmann::json& j, const RenderConstants& c) {
    j = nlohmann::json{
        {"version", c.version},
        {"sea_base", c.sea_base},
        {"sea_noise_amp", c.sea_noise_amp},
        {"sea_freq", c.sea_freq},
        {"sea_aniso", c.sea_aniso},
        {"sea_octaves", c.sea_octaves},
        {"hull_fill", c.hull_fill},
        {"albedo_offset", c.albedo_offset},
        {"hull_height", c.hull_height},
        {"shadow_strength", c.shadow_strength},
        {"illum_floor", c.illum_floor},
        {"container_brightness", c.container_brightness},
        {"hatch_darkness", c.hatch_darkness},
        {"pipeline_brightness", c.pipeline_brightness},
        {"superstructure_brightness", c.superstructure_brightness},
        {"deck_texture_amp", c.deck_texture_amp},
        {"wake_brightness", c.wake_brightness},
        {"wake_length", c.wake_length},
        {"fender_darkness", c.fender_darkness},
        {"noise_salt", c.noise_salt},
        {"panchro",
         {{"blue_gain", c.panchro.blue_gain},
          {"red_gamma", c.panchro.red_gamma},
          {"green_gamma", c.panchro.green_gamma},
          {"luma_weights", c.panchro.luma_weights}}},
    };
}

inline void from_json(const nlohmann::json& j, RenderConstants& c) {
    c = RenderConstants{};
    j.at("version").get_to(c.version);
    j.at("sea_base").get_to(c.sea_base);
    j.at("sea_noise_amp").get_to(c.sea_noise_amp);
    j.at("sea_freq").get_to(c.sea_freq);
    j.at("sea_aniso").get_to(c.sea_aniso);
    j.at("sea_octaves").get_to(c.sea_octaves);
    j.at("hull_fill").get_to(c.hull_fill);
    j.at("albedo_offset").get_to(c.albedo_offset);
    j.at("hull_height").get_to(c.hull_height);
    j.at("shadow_strength").get_to(c.shadow_strength);
    j.at("illum_floor").get_to(c.illum_floor);
    j.at("container_brightness").get_to(c.container_brightness);
    j.at("hatch_darkness").get_to(c.hatch_darkness);
    j.at("pipeline_brightness").get_to(c.pipeline_brightness);
    j.at("superstructure_brightness").get_to(c.superstructure_brightness);
    j.at("deck_texture_amp").get_to(c.deck_texture_amp);
    j.at("wake_brightness").get_to(c.wake_brightness);
    j.at("wake_length").get_to(c.wake_length);
    j.at("fender_darkness").get_to(c.fender_darkness);
    j.at("noise_salt").get_to(c.noise_salt);
    const auto& p = j.at("panchro");
    p.at("blue_gain").get_to(c.panchro.blue_gain);
    p.at("red_gamma").get_to(c.panchro.red_gamma);
    p.at("green_gamma").get_to(c.panchro.green_gamma);
    p.at("luma_weights").get_to(c.panchro.luma_weights);
}

inline std::uint64_t render_constants_hash(const RenderConstants& c) {
    const std::string dump = nlohmann::json(c).dump();
    return fnv1a(dump.data(), dump.size());
}

// Two systematically different constant sets sharing the class geometry:
// A is the stock configuration ("synthetic"), B perturbs the sea spectrum
// (frequency, amplitude, salt), shifts albedos, and swaps the panchromatic
// constants ("pseudo-real").
inline RenderConstants domain_shift_config(const RenderConstants& base, char shift_id) {
    if (shift_id == 'A') return base;
    if (shift_id != 'B')
        throw std::invalid_argument("domain_shift_config: shift_id must be 'A' or 'B'");
    RenderConstants c = base;
    c.sea_freq = base.sea_freq * 1.7;
    c.sea_noise_amp = base.sea_noise_amp + 0.03;
    c.noise_salt = mix64(base.noise_salt ^ 0xb5a551f7ULL);
    c.albedo_offset = base.albedo_offset + 0.08;
    c.illum_floor = std::min(0.9, base.illum_floor + 0.10);
    c.panchro.blue_gain = 0.8;
    c.panchro.red_gamma = 1.05;
    c.panchro.green_gamma = 0.95;
    return c;
}

// Deterministic scene draw: a pure function of (master_seed, class, index).
// Each field reads a fixed counter of a counter-based stream, so adding
// fields never reshuffles existing ones. Modifier flags are Bernoulli(0.5)
// where class-applicable: barges carry fenders/secondary vessels and never
// a wake; moving classes carry only the wake modifier.
inline SceneParams sample_scene(std::uint64_t master_seed, int vessel_class, int index) {
    if (vessel_class < 0 || vessel_class >= kClassCount)
        throw std::invalid_argument("sample_scene: bad vessel class");
    CounterRng rng(master_seed, hash_combine(static_cast<std::uint64_t>(vessel_class),
                                             static_cast<std::uint64_t>(index)));
    auto unit = [&](int counter) {
        return static_cast<double>(rng.word_at(counter) >> 11) * 0x1.0p-53;
    };
    SceneParams p;
    p.vessel_class = vessel_class;
    p.sun_elevation_deg = 15.0 + 75.0 * unit(0);
    p.sun_azimuth_deg = 360.0 * unit(1);
    p.sensor_off_nadir_deg = 45.0 * unit(2);
    p.sensor_azimuth_deg = 360.0 * unit(3);
    p.sea_state = static_cast<int>(std::min(5.0, 6.0 * unit(4)));
    p.hull_scale = 0.8 + 0.4 * unit(5);
    const bool barge = vessel_class == 0;
    p.wake = barge ? false : unit(6) < 0.5;
    p.secondary_vessel = barge ? unit(7) < 0.5 : false;
    p.fenders = barge ? unit(8) < 0.5 : false;
    p.seed = rng.word_at(9);
    return p;
}

// Optional per-layer masks for tests and debugging.
struct RenderLayers {
    std::vector<float> hull_coverage; // [0,1] per pixel
    std::vector<float> shadow;        // 1 where sea is shadowed by the hull
    std::vector<float> wake;          // wake intensity contribution
};

namespace detail {

struct ShipFrame {
    double half_length = 0.0;
    double half_beam = 0.0;
    double bow_start = 0.45; // fraction of half-length where the bow taper begins
    bool blunt = false;      // barge-style pontoon ends

    // half-width of the hull at longitudinal position t in [-1, 1]
    double width_at(double t) const {
        if (std::abs(t) > 1.0) return 0.0;
        if (blunt) {
            const double ramp = 0.08;
            double w = 1.0;
            if (t > 1.0 - ramp) w = 0.72 + 0.28 * (1.0 - t) / ramp;
            if (t < -1.0 + ramp) w = 0.72 + 0.28 * (t + 1.0) / ramp;
            return half_beam * w;
        }
        if (t > bow_start) {
            double s = (t - bow_start) / (1.0 - bow_start);
            return half_beam * std::sqrt(std::max(0.0, 1.0 - s * s));
        }
        if (t < -0.92) {
            double s = (-t - 0.92) / 0.08;
            return half_beam * (1.0 - 0.15 * s * s);
        }
        return half_beam;
    }

    // antialiased coverage of point (u, v) in ship coordinates
    double coverage(double u, double v) const {
        double t = u / half_length;
        if (std::abs(t) > 1.0 + 2.0 / half_length) return 0.0;
        double w = width_at(std::min(1.0, std::max(-1.0, t)));
        double edge_across = w - std::abs(v);
        double edge_along = (1.0 - std::abs(t)) * half_length;
        double cov = std::min(edge_across, edge_along) + 0.5;
        return std::min(1.0, std::max(0.0, cov));
    }
};

inline ShipFrame make_frame(const VesselTemplate& tpl, double length) {
    ShipFrame f;
    f.half_length = length / 2.0;
    f.half_beam = length / tpl.length_beam_ratio / 2.0;
    f.blunt = tpl.deck_pattern == DeckPattern::flat_deck;
    return f;
}

// Deck color in ship coordinates, before shading. Returns RGB.
inline std::array<double, 3> deck_color(const VesselTemplate& tpl, const RenderConstants& k,
                                        const ShipFrame& frame, double u, double v,
                                        std::uint64_t deck_seed, std::uint64_t color_seed) {
    const double albedo = tpl.base_albedo + k.albedo_offset;
    double base = albedo + k.deck_texture_amp * (value_noise(deck_seed, u * 0.7, v * 0.7) - 0.5);
    std::array<double, 3> rgb{base, base * 0.985, base * 0.955}; // steel-gray tint
    const double t = u / frame.half_length;

    switch (tpl.deck_pattern) {
    case DeckPattern::container_stacks: {
        if (t > -0.86 && t < 0.72) {
            const double bay_len = 7.0, gap = 1.6;
            const int lanes = std::max(2, static_cast<int>(frame.half_beam * 2.0 / 5.0));
            const double lane_w = frame.half_beam * 1.7 / lanes;
            double du = u + frame.half_length; // nonnegative along hull
            double bay_pos = std::fmod(du, bay_len + gap);
            double lane_f = (v + frame.half_beam * 0.85) / lane_w;
            int lane = static_cast<int>(std::floor(lane_f));
            double lane_pos = (lane_f - lane) * lane_w;
            if (lane >= 0 && lane < lanes && bay_pos < bay_len && lane_pos > 0.7 &&
                lane_pos < lane_w - 0.7 && std::abs(v) < frame.half_beam * 0.85) {
                int bay = static_cast<int>(du / (bay_len + gap));
                std::uint64_t h = mix64(color_seed ^ hash_combine(bay, lane));
                double lum = k.container_brightness * (0.55 + 0.45 * ((h >> 8) & 0xff) / 255.0);
                rgb[0] = albedo + lum * (0.8 + 0.4 * ((h >> 16) & 0xff) / 255.0);
                rgb[1] = albedo + lum * (0.8 + 0.4 * ((h >> 24) & 0xff) / 255.0);
                rgb[2] = albedo + lum * (0.8 + 0.4 * ((h >> 32) & 0xff) / 255.0);
            } else if (std::abs(v) < frame.half_beam * 0.9 && t > -0.9 && t < 0.78) {
                rgb[0] = rgb[1] = rgb[2] = albedo - 0.10; // inter-stack gaps
            }
        }
        break;
    }
    case DeckPattern::hatch_rows: {
        if (t > -0.82 && t < 0.70 && std::abs(v) < frame.half_beam * 0.72) {
            const double hatch_len = 10.0, gap = 4.5;
            double du = u + frame.half_length;
            double pos = std::fmod(du, hatch_len + gap);
            if (pos < hatch_len) {
                double d = albedo - k.hatch_darkness;
                rgb = {d, d * 0.99, d * 0.97};
            }
        }
        break;
    }
    case DeckPattern::pipeline_spine: {
        double spine_w = std::max(0.9, frame.half_beam * 0.14);
        rgb[0] -= 0.05; // tanker decks read darker
        rgb[1] -= 0.05;
        rgb[2] -= 0.05;
        if (std::abs(v) < spine_w && t > -0.9 && t < 0.75) {
            double b = albedo + k.pipeline_brightness;
            rgb = {b, b, b * 0.98};
        } else if (t > -0.75 && t < 0.65) {
            // transverse manifold lines every ~1/5 of the hull
            double du = u + frame.half_length;
            double period = frame.half_length * 2.0 / 5.0;
            double pos = std::fmod(du, period);
            if (pos < 1.4 && std::abs(v) < frame.half_beam * 0.55) {
                rgb[0] += 0.10;
                rgb[1] += 0.10;
                rgb[2] += 0.10;
            }
        }
        break;
    }
    case DeckPattern::flat_deck: {
        double extra = k.deck_texture_amp * 0.5 *
                       (value_noise(mix64(deck_seed), u * 0.25, v * 0.25) - 0.5);
        rgb[0] += extra;
        rgb[1] += extra;
        rgb[2] += extra;
        double w = frame.width_at(std::min(1.0, std::max(-1.0, t)));
        if (w - std::abs(v) < 1.4) { // coaming rim highlight
            rgb[0] += 0.07;
            rgb[1] += 0.07;
            rgb[2] += 0.07;
        }
        break;
    }
    }

    // superstructure block
    if (tpl.superstructure_position >= 0.0) {
        double ts = 2.0 * tpl.superstructure_position - 1.0;
        if (std::abs(t - ts) < 0.07 && std::abs(v) < frame.half_beam * 0.8) {
            double b = albedo + k.superstructure_brightness;
            rgb = {b, b, b};
        }
    }
    return rgb;
}

} // namespace detail

// Deterministic rasterizer. Fixed pass order: seeded sea noise, hull shadow,
// wake streak, optional secondary vessel, hull with class deck pattern and
// Lambertian shading, clamp. Pixel values depend only on (params, size,
// constants).
inline ImageChip render_chip(const SceneParams& params, int size, const RenderConstants& constants,
                             RenderLayers* layers = nullptr) {
    if (size < 64)
        throw std::invalid_argument("render_chip: size must be >= 64");
    params.validate();

    const auto& tpl = default_templates()[params.vessel_class];
    const double deg = M_PI / 180.0;
    const double sun_el = params.sun_elevation_deg * deg;
    const double sun_az = params.sun_azimuth_deg * deg;
    const double off_nadir = params.sensor_off_nadir_deg * deg;
    const double sensor_az = params.sensor_azimuth_deg * deg;

    CounterRng prng(params.seed, 0xc41bULL);
    auto unit = [&](int counter) {
        return static_cast<double>(prng.word_at(counter) >> 11) * 0x1.0p-53;
    };
    const double hull_angle = 2.0 * M_PI * unit(0);
    const double jx = -3.0 + 6.0 * unit(1);
    const double jy = -3.0 + 6.0 * unit(2);
    const std::uint64_t sea_seed = mix64(constants.noise_salt ^ prng.word_at(3));
    const std::uint64_t deck_seed = prng.word_at(4);
    const std::uint64_t wake_seed = prng.word_at(5);
    const std::uint64_t color_seed = prng.word_at(6);

    const double length = constants.hull_fill * size * params.hull_scale;
    detail::ShipFrame frame = detail::make_frame(tpl, length);
    detail::ShipFrame sec_frame;
    double sec_u = 0.0, sec_v = 0.0, sec_angle = 0.0;
    if (params.secondary_vessel) {
        sec_frame = detail::make_frame(default_templates()[1], length * 0.28);
        sec_frame.blunt = false;
        sec_u = (unit(7) - 0.5) * frame.half_length;
        sec_v = (frame.half_beam + 7.0 + 6.0 * unit(8)) * (unit(9) < 0.5 ? 1.0 : -1.0);
        sec_angle = (unit(10) - 0.5) * 0.6;
    }

    const double center = (size - 1) / 2.0;
    const double stretch = 1.0 / std::cos(off_nadir) - 1.0; // inverse foreshortening
    const double ax = std::cos(sensor_az), ay = std::sin(sensor_az);
    const double ca = std::cos(hull_angle), sa = std::sin(hull_angle);

    // shadow offset, cast opposite the sun azimuth, length ~ cot(elevation)
    const double shadow_len = constants.hull_height * (std::cos(sun_el) / std::sin(sun_el));
    const double shx = -shadow_len * std::cos(sun_az);
    const double shy = -shadow_len * std::sin(sun_az);

    // sun direction in ship coordinates for deck shading
    const double sun_az_ship = sun_az - hull_angle;
    const double sun_x = std::cos(sun_el) * std::cos(sun_az_ship);
    const double sun_y = std::cos(sun_el) * std::sin(sun_az_ship);
    const double sun_z = std::sin(sun_el);

    const double sea_amp = constants.sea_noise_amp * (0.35 + 0.65 * params.sea_state / 5.0);
    const double sea_illum = 0.75 + 0.25 * std::sin(sun_el);
    const double wake_len = constants.wake_length * length;

    ImageChip img(size, size, 3);
    if (layers) {
        layers->hull_coverage.assign(static_cast<std::size_t>(size) * size, 0.0f);
        layers->shadow.assign(static_cast<std::size_t>(size) * size, 0.0f);
        layers->wake.assign(static_cast<std::size_t>(size) * size, 0.0f);
    }

    auto to_ship = [&](double wx, double wy, double& u, double& v) {
        double dx = wx - jx, dy = wy - jy;
        u = ca * dx + sa * dy;
        v = -sa * dx + ca * dy;
    };

    for (int py = 0; py < size; ++py) {
        for (int px = 0; px < size; ++px) {
            // image -> world: undo the foreshortening compression along the
            // sensor ground-track direction
            double dx = px - center, dy = py - center;
            double along = dx * ax + dy * ay;
            double wx = dx + stretch * along * ax;
            double wy = dy + stretch * along * ay;

            double u, v;
            to_ship(wx, wy, u, v);

            // sea
            double n = fbm(sea_seed, wx * constants.sea_freq,
                           wy * constants.sea_freq * constants.sea_aniso, constants.sea_octaves);
            double r = (constants.sea_base[0] + sea_amp * (n - 0.5)) * sea_illum;
            double g = (constants.sea_base[1] + sea_amp * (n - 0.5)) * sea_illum;
            double b = (constants.sea_base[2] + sea_amp * (n - 0.5)) * sea_illum;

            double cov = frame.coverage(u, v);

            // hull shadow on the sea
            double su, sv;
            to_ship(wx - shx, wy - shy, su, sv);
            bool shadowed = frame.coverage(su, sv) > 0.5 && cov <= 0.5;
            if (shadowed) {
                r *= 1.0 - constants.shadow_strength;
                g *= 1.0 - constants.shadow_strength;
                b *= 1.0 - constants.shadow_strength;
                if (layers) layers->shadow[static_cast<std::size_t>(py) * size + px] = 1.0f;
            }

            // wake: fading triangular streak astern
            if (params.wake && cov < 1.0) {
                double du = -(u + frame.half_length);
                if (du > 0.0 && du < wake_len) {
                    double half_w = frame.half_beam * (0.55 + 1.9 * du / wake_len);
                    if (std::abs(v) < half_w) {
                        double fade = 1.0 - du / wake_len;
                        double foam = constants.wake_brightness * fade * fade *
                                      (0.55 + 0.45 * value_noise(wake_seed, u * 0.35, v * 0.6));
                        double lateral = 1.0 - std::abs(v) / half_w;
                        foam *= 0.4 + 0.6 * lateral;
                        r += foam;
                        g += foam;
                        b += foam;
                        if (layers)
                            layers->wake[static_cast<std::size_t>(py) * size + px] =
                                static_cast<float>(foam);
                    }
                }
            }

            // secondary vessel: a small generic hull alongside
            if (params.secondary_vessel) {
                double cs = std::cos(sec_angle), sn = std::sin(sec_angle);
                double u2 = cs * (u - sec_u) + sn * (v - sec_v);
                double v2 = -sn * (u - sec_u) + cs * (v - sec_v);
                double cov2 = sec_frame.coverage(u2, v2);
                if (cov2 > 0.0) {
                    double shade = constants.illum_floor + (1.0 - constants.illum_floor) * sun_z;
                    double hc = (0.52 + constants.albedo_offset) * shade;
                    r = r * (1 - cov2) + hc * cov2;
                    g = g * (1 - cov2) + hc * 0.99 * cov2;
                    b = b * (1 - cov2) + hc * 0.97 * cov2;
                }
            }

            // main hull
            if (cov > 0.0) {
                auto rgb = detail::deck_color(tpl, constants, frame, u, v, deck_seed, color_seed);

                // deck normal tilts outward near the gunwale
                double t = std::min(1.0, std::max(-1.0, u / frame.half_length));
                double w_here = std::max(frame.width_at(t), 1e-6);
                double lat = v / w_here;
                double tilt = 0.55 * lat * lat * lat;
                double nz = 1.0 / std::sqrt(1.0 + tilt * tilt);
                double ny = tilt * nz;
                double lambert = std::max(0.0, ny * sun_y + nz * sun_z);
                double shade = constants.illum_floor + (1.0 - constants.illum_floor) * lambert;

                // fenders: dark blobs along a barge hull's sides
                if (params.fenders) {
                    for (double ts : {-0.7, -0.35, 0.0, 0.35, 0.7}) {
                        double fu = ts * frame.half_length;
                        double fw = frame.width_at(ts);
                        for (double side : {-1.0, 1.0}) {
                            double d2 = (u - fu) * (u - fu) + (v - side * fw) * (v - side * fw);
                            if (d2 < 2.4 * 2.4) {
                                rgb[0] -= constants.fender_darkness;
                                rgb[1] -= constants.fender_darkness;
                                rgb[2] -= constants.fender_darkness;
                            }
                        }
                    }
                }

                r = r * (1 - cov) + rgb[0] * shade * cov;
                g = g * (1 - cov) + rgb[1] * shade * cov;
                b = b * (1 - cov) + rgb[2] * shade * cov;
                if (layers)
                    layers->hull_coverage[static_cast<std::size_t>(py) * size + px] =
                        static_cast<float>(cov);
            }

            img.at(px, py, 0) = clamp01(r);
            img.at(px, py, 1) = clamp01(g);
            img.at(px, py, 2) = clamp01(b);
        }
    }
    return img;
}

inline ImageChip render_chip(const SceneParams& params, int size) {
    return render_chip(params, size, RenderConstants{});
}

// Renders 4 * per_class chips, applies the pseudo-panchromatic pipeline, and
// writes PNGs plus the manifest. Rows are ordered (class, index); renders run
// in parallel but every byte of output is a pure function of the arguments.
inline std::string generate_dataset(std::uint64_t master_seed, int per_class, int size,
                                    const PanchroParams& panchro, const std::string& out_dir,
                                    const RenderConstants& constants = RenderConstants{},
                                    int jobs = 0) {
    if (per_class < 1) throw std::invalid_argument("generate_dataset: per_class must be >= 1");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("generate_dataset: cannot create " + out_dir + ": " + ec.message());

    const int total = kClassCount * per_class;
    std::vector<ImageChip> chips(total);
    std::vector<SceneParams> scenes(total);
    parallel_for(total, jobs, [&](int i) {
        const int cls = i / per_class, idx = i % per_class;
        scenes[i] = sample_scene(master_seed, cls, idx);
        chips[i] = panchromatic_simulate(render_chip(scenes[i], size, constants), panchro);
    });

    std::vector<DatasetEntry> entries;
    entries.reserve(total);
    char name[64];
    for (int i = 0; i < total; ++i) {
        const int cls = i / per_class, idx = i % per_class;
        std::snprintf(name, sizeof name, "%s_%05d.png", kClassNames[cls], idx);
        write_png((fs::path(out_dir) / name).string(), chips[i]);
        DatasetEntry e;
        e.path = name;
        e.label = cls;
        e.domain = DomainTag::synthetic;
        e.width = size;
        e.height = size;
        e.seed = scenes[i].seed;
        entries.push_back(std::move(e));
    }

    char hash_hex[32], panchro_line[160];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(render_constants_hash(constants)));
    std::snprintf(panchro_line, sizeof panchro_line,
                  "panchro blue_gain=%g red_gamma=%g green_gamma=%g luma=%g,%g,%g",
                  panchro.blue_gain, panchro.red_gamma, panchro.green_gamma,
                  panchro.luma_weights[0], panchro.luma_weights[1], panchro.luma_weights[2]);
    std::string manifest = (fs::path(out_dir) / "manifest.csv").string();
    write_manifest(manifest, entries,
                   {std::string("render_constants_hash=") + hash_hex +
                        " version=" + std::to_string(constants.version),
                    panchro_line, "master_seed=" + std::to_string(master_seed)});
    return manifest;
}

} // namespace vbench
