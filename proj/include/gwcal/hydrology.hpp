#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gwcal::hydrology {

/// One station-week of meteorological forcing. Precipitation is the weekly
/// cumulative depth; the remaining variables are weekly means.
struct WeeklyMet {
    std::string week_start;  // ISO date, first day of the week
    double precip_mm = 0.0;
    double tmin_c = 0.0;
    double tmax_c = 0.0;
    double tmean_c = 0.0;
    double rh_pct = 0.0;    // mean relative humidity [%]
    double rs_wm2 = 0.0;    // mean shortwave radiation [W/m^2]
    double wind_ms = 0.0;   // mean wind speed at 2 m [m/s]
};

struct StationSeries {
    std::string id;
    double latitude_deg = 0.0;
    double elevation_m = 0.0;
    std::vector<WeeklyMet> weeks;
    std::set<std::string> missing;  // variable names without data
    std::map<std::string, std::string> provenance;  // variable -> donor id
};

struct SubBasin {
    std::string id;
    std::string name;
    double area_km2 = 0.0;
    double cn = 0.0;  // curve number, (0, 100]
    std::map<std::string, double> station_weights;  // sums to 1

    void validate(const std::vector<std::string>& station_ids) const;
};

/// Weekly water balance of one sub-basin [mm/week].
struct BasinWeek {
    std::string week_start;
    double p = 0.0;    // precipitation
    double pe = 0.0;   // runoff (precipitation excess)
    double pet = 0.0;  // potential evapotranspiration
    double rp = 0.0;   // recharge due to precipitation
};

struct BasinRecharge {
    std::string basin_id;
    std::vector<BasinWeek> weeks;
    double mean_flux_ms = 0.0;  // period-average recharge flux [m/s]
};

/// SCS potential maximum retention S [mm] for a curve number in (0, 100].
double scs_potential_retention(double cn);

/// SCS-CN runoff: P_e = (P - Ia)^2 / (P - Ia + S) for P > Ia, else 0,
/// with Ia = 0.2 S.
double scs_runoff(double p_cum_mm, double cn);

/// FAO-56 Penman-Monteith reference evapotranspiration [mm/day] evaluated on
/// weekly-mean inputs. Radiation is the measured shortwave mean [W/m^2];
/// vapour pressure uses the mean-RH convention. `day_of_year` locates the
/// extraterrestrial radiation (use the middle of the week).
double penman_monteith_et0_mm_day(const WeeklyMet& met, double latitude_deg,
                                  double elevation_m, int day_of_year);

/// Weekly PET [mm/week]: the daily reference rate times seven.
double penman_monteith_pet(const WeeklyMet& met, double latitude_deg,
                           double elevation_m, int day_of_year);

/// R_P = max(0, P - P_e - PET), all terms [mm/week].
double weekly_recharge(double p_mm, double pe_mm, double pet_mm);

/// Mean weekly recharge converted to a flux: mm/week -> m/s.
double mm_per_week_to_ms(double mm_week);

/// Copies donor values into every variable the station is missing; records
/// provenance per variable. Throws when a variable is missing from both, or
/// when the two series cover different weeks.
StationSeries fill_missing(const StationSeries& station,
                           const StationSeries& donor);

/// Day of year (1-366) for an ISO date, plus an offset in days.
int day_of_year(const std::string& iso_date, int offset_days = 0);

/// Weekly basin series: precipitation and PET are station-weighted, runoff
/// uses the basin curve number on the weighted precipitation.
BasinRecharge basin_recharge(const SubBasin& basin,
                             const std::vector<StationSeries>& stations);

/// Area-weighted domain average of per-basin fluxes [m/s].
double domain_average_flux(const std::vector<SubBasin>& basins,
                           const std::vector<BasinRecharge>& recharge);

}  // namespace gwcal::hydrology
