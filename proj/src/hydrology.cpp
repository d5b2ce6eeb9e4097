#include "gwcal/hydrology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gwcal::hydrology {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStefanBoltzmann = 4.903e-9;  // MJ K^-4 m^-2 day^-1
constexpr double kSecondsPerWeek = 7.0 * 86400.0;

double saturation_vapour_pressure(double t_c) {
    return 0.6108 * std::exp(17.27 * t_c / (t_c + 237.3));
}

}  // namespace

void SubBasin::validate(const std::vector<std::string>& station_ids) const {
    if (!(cn > 0.0) || cn > 100.0)
        throw std::invalid_argument("basin '" + id +
                                    "': curve number must be in (0, 100]");
    if (!(area_km2 > 0.0))
        throw std::invalid_argument("basin '" + id + "': area must be positive");
    double sum = 0.0;
    for (const auto& [sid, w] : station_weights) {
        if (w < 0.0)
            throw std::invalid_argument("basin '" + id +
                                        "': negative station weight");
        if (std::find(station_ids.begin(), station_ids.end(), sid) ==
            station_ids.end())
            throw std::invalid_argument("basin '" + id +
                                        "': weight refers to unknown station '" +
                                        sid + "'");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("basin '" + id +
                                    "': station weights must sum to 1");
}

double scs_potential_retention(double cn) {
    if (!(cn > 0.0) || cn > 100.0)
        throw std::invalid_argument("curve number must be in (0, 100]");
    return 25.4 * (1000.0 / cn - 10.0);
}

double scs_runoff(double p_cum_mm, double cn) {
    if (p_cum_mm < 0.0)
        throw std::invalid_argument("cumulative precipitation must be >= 0");
    const double s = scs_potential_retention(cn);
    const double ia = 0.2 * s;
    if (p_cum_mm <= ia) return 0.0;
    return (p_cum_mm - ia) * (p_cum_mm - ia) / (p_cum_mm - ia + s);
}

double penman_monteith_et0_mm_day(const WeeklyMet& met, double latitude_deg,
                                  double elevation_m, int day_of_year) {
    if (met.rh_pct < 0.0 || met.rh_pct > 100.0)
        throw std::invalid_argument("relative humidity outside [0, 100]");
    if (met.rs_wm2 < 0.0)
        throw std::invalid_argument("negative shortwave radiation");
    if (met.wind_ms < 0.0)
        throw std::invalid_argument("negative wind speed");
    if (met.tmax_c < met.tmin_c)
        throw std::invalid_argument("tmax below tmin");

    const double t = met.tmean_c;
    const double p_atm =
        101.3 * std::pow((293.0 - 0.0065 * elevation_m) / 293.0, 5.26);
    const double gamma = 0.000665 * p_atm;  // psychrometric constant [kPa/C]
    const double es = 0.5 * (saturation_vapour_pressure(met.tmax_c) +
                             saturation_vapour_pressure(met.tmin_c));
    const double ea = met.rh_pct / 100.0 * es;  // mean-RH convention
    const double delta =
        4098.0 * saturation_vapour_pressure(t) / ((t + 237.3) * (t + 237.3));

    // Extraterrestrial radiation for the given day of year [MJ/m2/day].
    const double lat = latitude_deg * kPi / 180.0;
    const double dr = 1.0 + 0.033 * std::cos(2.0 * kPi * day_of_year / 365.0);
    const double dec = 0.409 * std::sin(2.0 * kPi * day_of_year / 365.0 - 1.39);
    const double cos_ws = std::clamp(-std::tan(lat) * std::tan(dec), -1.0, 1.0);
    const double ws = std::acos(cos_ws);
    const double ra =
        24.0 * 60.0 / kPi * 0.0820 * dr *
        (ws * std::sin(lat) * std::sin(dec) +
         std::cos(lat) * std::cos(dec) * std::sin(ws));

    const double rs = met.rs_wm2 * 0.0864;  // W/m^2 -> MJ/m^2/day
    const double rso = (0.75 + 2e-5 * elevation_m) * ra;
    const double rns = (1.0 - 0.23) * rs;
    // Cloudiness factor clamped to [0, 1]: the clear-sky ratio formula does
    // not hold for fully overcast or dark conditions.
    const double ratio = rso > 0.0 ? std::min(rs / rso, 1.0) : 0.0;
    const double fcd = std::clamp(1.35 * ratio - 0.35, 0.0, 1.0);
    const double tmax_k = met.tmax_c + 273.16;
    const double tmin_k = met.tmin_c + 273.16;
    const double rnl = kStefanBoltzmann * 0.5 *
                       (std::pow(tmax_k, 4) + std::pow(tmin_k, 4)) *
                       (0.34 - 0.14 * std::sqrt(std::max(ea, 0.0))) * fcd;
    const double rn = rns - rnl;

    const double numerator =
        0.408 * delta * rn +
        gamma * 900.0 / (t + 273.0) * met.wind_ms * (es - ea);
    const double denominator = delta + gamma * (1.0 + 0.34 * met.wind_ms);
    return std::max(numerator / denominator, 0.0);
}

double penman_monteith_pet(const WeeklyMet& met, double latitude_deg,
                           double elevation_m, int day_of_year) {
    return 7.0 * penman_monteith_et0_mm_day(met, latitude_deg, elevation_m,
                                            day_of_year);
}

double weekly_recharge(double p_mm, double pe_mm, double pet_mm) {
    if (p_mm < 0.0 || pe_mm < 0.0 || pet_mm < 0.0)
        throw std::invalid_argument("weekly_recharge: negative input");
    return std::max(0.0, p_mm - pe_mm - pet_mm);
}

double mm_per_week_to_ms(double mm_week) {
    return mm_week * 1e-3 / kSecondsPerWeek;
}

int day_of_year(const std::string& iso_date, int offset_days) {
    int y = 0, m = 0, d = 0;
    if (iso_date.size() != 10 ||
        std::sscanf(iso_date.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3)
        throw std::invalid_argument("bad ISO date '" + iso_date + "'");
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad ISO date '" + iso_date + "'");
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    int doy = d;
    for (int i = 0; i < m - 1; ++i) doy += days[i];
    if (leap && m > 2) ++doy;
    doy += offset_days;
    const int year_len = leap ? 366 : 365;
    while (doy > year_len) doy -= year_len;
    while (doy < 1) doy += year_len;
    return doy;
}

StationSeries fill_missing(const StationSeries& station,
                           const StationSeries& donor) {
    StationSeries out = station;
    if (station.missing.empty()) return out;
    if (donor.weeks.size() != station.weeks.size())
        throw std::invalid_argument("fill_missing: donor series '" + donor.id +
                                    "' covers a different number of weeks");
    for (std::size_t i = 0; i < station.weeks.size(); ++i)
        if (donor.weeks[i].week_start != station.weeks[i].week_start)
            throw std::invalid_argument("fill_missing: week mismatch at '" +
                                        station.weeks[i].week_start + "'");

    for (const std::string& var : station.missing) {
        if (donor.missing.count(var))
            throw std::invalid_argument("variable '" + var +
                                        "' missing from station '" +
                                        station.id + "' and donor '" +
                                        donor.id + "'");
        for (std::size_t i = 0; i < out.weeks.size(); ++i) {
            WeeklyMet& w = out.weeks[i];
            const WeeklyMet& dw = donor.weeks[i];
            if (var == "precip_mm") w.precip_mm = dw.precip_mm;
            else if (var == "tmin_c") w.tmin_c = dw.tmin_c;
            else if (var == "tmax_c") w.tmax_c = dw.tmax_c;
            else if (var == "tmean_c") w.tmean_c = dw.tmean_c;
            else if (var == "rh_pct") w.rh_pct = dw.rh_pct;
            else if (var == "rs_wm2") w.rs_wm2 = dw.rs_wm2;
            else if (var == "wind_ms") w.wind_ms = dw.wind_ms;
            else
                throw std::invalid_argument("unknown met variable '" + var +
                                            "'");
        }
        out.provenance[var] = donor.id;
    }
    out.missing.clear();
    return out;
}

BasinRecharge basin_recharge(const SubBasin& basin,
                             const std::vector<StationSeries>& stations) {
    if (stations.empty())
        throw std::invalid_argument("basin_recharge: no stations");
    const std::size_t nweeks = stations.front().weeks.size();
    if (nweeks == 0)
        throw std::invalid_argument("basin_recharge: empty period");
    for (const auto& s : stations) {
        if (s.weeks.size() != nweeks)
            throw std::invalid_argument("station '" + s.id +
                                        "' covers a different period");
        if (!s.missing.empty())
            throw std::invalid_argument("station '" + s.id +
                                        "' still has missing variables; run "
                                        "fill_missing first");
    }

    BasinRecharge out;
    out.basin_id = basin.id;
    out.weeks.resize(nweeks);
    double rp_sum = 0.0;
    for (std::size_t w = 0; w < nweeks; ++w) {
        BasinWeek bw;
        bw.week_start = stations.front().weeks[w].week_start;
        const int doy = day_of_year(bw.week_start, 3);  // mid-week
        for (const auto& s : stations) {
            const auto it = basin.station_weights.find(s.id);
            if (it == basin.station_weights.end() || it->second == 0.0)
                continue;
            bw.p += it->second * s.weeks[w].precip_mm;
            bw.pet += it->second * penman_monteith_pet(s.weeks[w],
                                                       s.latitude_deg,
                                                       s.elevation_m, doy);
        }
        bw.pe = scs_runoff(bw.p, basin.cn);
        bw.rp = weekly_recharge(bw.p, bw.pe, bw.pet);
        rp_sum += bw.rp;
        out.weeks[w] = bw;
    }
    out.mean_flux_ms = mm_per_week_to_ms(rp_sum / static_cast<double>(nweeks));
    return out;
}

double domain_average_flux(const std::vector<SubBasin>& basins,
                           const std::vector<BasinRecharge>& recharge) {
    if (basins.size() != recharge.size() || basins.empty())
        throw std::invalid_argument("domain_average_flux: size mismatch");
    double area = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < basins.size(); ++i) {
        area += basins[i].area_km2;
        weighted += basins[i].area_km2 * recharge[i].mean_flux_ms;
    }
    return weighted / area;
}

}  // namespace gwcal::hydrology
