#include "dynkin/json_io.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace dynkin {

namespace {

using ordered = nlohmann::ordered_json;

ordered jnum(double v) {
    if (!std::isfinite(v)) return ordered(nullptr);
    return ordered(v);
}

ordered endpoint_obj(const EndpointReport& e) {
    ordered o;
    o["endpoint"] = jnum(e.endpoint);
    o["declared"] = to_string(e.declared);
    o["attainable"] = e.attainable;
    o["enterable"] = e.enterable;
    o["regular"] = e.regular;
    o["inferred"] = e.inferred ? ordered(to_string(*e.inferred)) : ordered(nullptr);
    o["matches_declaration"] = e.matches_declaration;
    o["exit_integral"] = jnum(e.exit_integral);
    o["entrance_integral"] = jnum(e.entrance_integral);
    o["note"] = e.note;
    return o;
}

ordered uniqueness_obj(const UniquenessCertificate& u) {
    ordered o;
    o["status"] = to_string(u.status);
    o["loss_classes_ok"] = u.loss_classes_ok;
    o["loss_stationary_ok"] = u.loss_stationary_ok;
    o["slope_separation_ok"] = u.slope_separation_ok;
    o["reply_monotone_ok"] = u.reply_monotone_ok;
    o["scan_root_count"] = u.scan_roots.size();
    ordered roots = ordered::array();
    for (double r : u.scan_roots) roots.push_back(jnum(r));
    o["scan_roots"] = roots;
    o["detail"] = u.detail;
    return o;
}

ordered equilibrium_obj(const EquilibriumResult& eq) {
    ordered o;
    o["regime"] = to_string(eq.regime);
    ordered th;
    th["x1_star"] = jnum(eq.x1_star);
    th["x2_star"] = jnum(eq.x2_star);
    th["y1_star"] = jnum(eq.y1_star);
    th["y2_star"] = jnum(eq.y2_star);
    o["thresholds"] = th;
    ordered res;
    res["residual_1"] = jnum(eq.residual_1);
    res["residual_2"] = jnum(eq.residual_2);
    res["fixed_point_gap"] = jnum(eq.fixed_point_gap);
    o["residuals"] = res;
    ordered co;
    co["m1"] = jnum(eq.m1);
    co["q1"] = jnum(eq.q1);
    co["m2"] = jnum(eq.m2);
    co["q2"] = jnum(eq.q2);
    co["p1"] = jnum(eq.p1);
    co["p2"] = jnum(eq.p2);
    o["coefficients"] = co;
    ordered aux;
    aux["x2_inf"] = jnum(eq.x2_inf);
    aux["y2_inf"] = jnum(eq.y2_inf);
    aux["y1_inf"] = jnum(eq.y1_inf);
    aux["x_s"] = jnum(eq.x_s);
    aux["y_s"] = jnum(eq.y_s);
    aux["y_t"] = jnum(eq.y_t);
    aux["yhat_t"] = jnum(eq.yhat_t);
    aux["x_prime_1"] = jnum(eq.x_prime_1);
    aux["x_prime_2"] = jnum(eq.x_prime_2);
    o["auxiliaries"] = aux;
    o["strategy_note"] = eq.strategy_note;
    o["uniqueness"] = uniqueness_obj(eq.uniqueness);
    o["detail"] = eq.detail;
    return o;
}

ordered deviation_obj(const DeviationReport& d) {
    ordered o;
    o["pass"] = d.pass;
    o["equilibrium_value_1"] = jnum(d.eq_value_1);
    o["equilibrium_se_1"] = jnum(d.eq_se_1);
    o["equilibrium_value_2"] = jnum(d.eq_value_2);
    o["equilibrium_se_2"] = jnum(d.eq_se_2);
    ordered cases = ordered::array();
    for (const DeviationCase& c : d.cases) {
        ordered e;
        e["player"] = c.player;
        e["never"] = c.never;
        e["threshold"] = c.never ? ordered(nullptr) : jnum(c.threshold);
        e["estimate"] = jnum(c.estimate);
        e["standard_error"] = jnum(c.standard_error);
        e["ok"] = c.ok;
        cases.push_back(e);
    }
    o["cases"] = cases;
    return o;
}

ordered martingale_obj(const MartingaleReport& m) {
    ordered o;
    o["pass"] = m.pass();
    o["martingale_ok"] = m.martingale_ok;
    o["submartingale_ok"] = m.submartingale_ok;
    o["phi_ok"] = m.phi_ok;
    o["v1_x0"] = jnum(m.v1_x0);
    o["v2_x0"] = jnum(m.v2_x0);
    o["phi_x0"] = jnum(m.phi_x0);
    ordered cps = ordered::array();
    for (const MartingaleCheckpoint& c : m.checkpoints) {
        ordered e;
        e["t"] = jnum(c.t);
        e["mean_1"] = jnum(c.mean_1);
        e["se_1"] = jnum(c.se_1);
        e["mean_2"] = jnum(c.mean_2);
        e["se_2"] = jnum(c.se_2);
        e["sub_mean_1"] = jnum(c.sub_mean_1);
        e["sub_se_1"] = jnum(c.sub_se_1);
        e["sub_mean_2"] = jnum(c.sub_mean_2);
        e["sub_se_2"] = jnum(c.sub_se_2);
        e["phi_mean"] = jnum(c.phi_mean);
        e["phi_se"] = jnum(c.phi_se);
        cps.push_back(e);
    }
    o["checkpoints"] = cps;
    return o;
}

std::string finish(ordered o) { return o.dump(2) + "\n"; }

}  // namespace

std::string boundary_report_json(const BoundaryReport& rep) {
    ordered o;
    o["schema_version"] = kSchemaVersion;
    o["lower"] = endpoint_obj(rep.lower);
    o["upper"] = endpoint_obj(rep.upper);
    o["all_match"] = rep.all_match();
    return finish(o);
}

std::string assumption_report_json(const AssumptionReport& rep) {
    ordered o;
    o["schema_version"] = kSchemaVersion;
    o["costs_ordered"] = rep.costs_ordered;
    o["classes_ok"] = rep.classes_ok;
    o["limits_ok"] = rep.limits_ok;
    o["relaxed_applies"] = rep.relaxed_applies;
    o["route"] = to_string(rep.route);
    o["all_standard"] = rep.all_standard();
    o["detail"] = rep.detail;
    return finish(o);
}

std::string equilibrium_json(const EquilibriumResult& eq) {
    ordered o;
    o["schema_version"] = kSchemaVersion;
    ordered body = equilibrium_obj(eq);
    for (auto it = body.begin(); it != body.end(); ++it) o[it.key()] = it.value();
    return finish(o);
}

std::string verify_report_json(const EquilibriumResult& eq, const ResidualReport& res,
                               bool residual_pass, const DeviationReport* dev,
                               const MartingaleReport* mart, bool overall_pass) {
    ordered o;
    o["schema_version"] = kSchemaVersion;
    o["equilibrium"] = equilibrium_obj(eq);
    ordered v;
    v["ode_residual_1"] = jnum(res.ode_residual_1);
    v["ode_residual_2"] = jnum(res.ode_residual_2);
    v["gen_sign_ok_1"] = res.gen_sign_ok_1;
    v["gen_sign_ok_2"] = res.gen_sign_ok_2;
    v["obstacle_min_1"] = jnum(res.obstacle_min_1);
    v["obstacle_min_2"] = jnum(res.obstacle_min_2);
    v["smooth_gap_1"] = jnum(res.smooth_gap_1);
    v["smooth_gap_2"] = jnum(res.smooth_gap_2);
    v["kink_1"] = jnum(res.kink_1);
    v["kink_2"] = jnum(res.kink_2);
    v["pass"] = residual_pass;
    o["variational"] = v;
    o["deviation"] = dev ? deviation_obj(*dev) : ordered(nullptr);
    o["martingale"] = mart ? martingale_obj(*mart) : ordered(nullptr);
    o["pass"] = overall_pass;
    return finish(o);
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
    ordered o;
    o["schema_version"] = kSchemaVersion;
    ordered arr = ordered::array();
    for (const SweepRow& r : rows) {
        ordered e;
        e["parameter"] = r.parameter;
        e["value"] = jnum(r.value);
        e["regime"] = to_string(r.regime);
        e["x1_star"] = jnum(r.x1_star);
        e["x2_star"] = jnum(r.x2_star);
        e["y1_star"] = jnum(r.y1_star);
        e["y2_star"] = jnum(r.y2_star);
        arr.push_back(e);
    }
    o["rows"] = arr;
    return finish(o);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "parameter,value,regime,x1_star,x2_star,y1_star,y2_star\n";
    for (const SweepRow& r : rows) {
        out << r.parameter << ',' << r.value << ',' << to_string(r.regime) << ','
            << r.x1_star << ',' << r.x2_star << ',' << r.y1_star << ',' << r.y2_star << '\n';
    }
    return out.str();
}

}  // namespace dynkin
