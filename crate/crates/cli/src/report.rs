use std::collections::BTreeMap;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use orbq_core::orbifold::OrbifoldReport;
use orbq_core::qseries::rational::format_rational;
use serde_json::{json, Value};

fn big(v: &BigInt) -> Value {
    v.to_i64().map_or_else(|| Value::String(v.to_string()), Value::from)
}

/// Human-readable report. Deterministic: no timings, no cache statistics.
pub fn render_text(r: &OrbifoldReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "central charge   {}", r.central_charge);
    let _ = writeln!(s, "cycle type       {}", r.cycle_type);
    let _ = writeln!(s, "order            {}", r.order);
    let _ = writeln!(s, "lift             {}", r.case);
    let _ = writeln!(s, "type             {}", r.orbifold_type);
    let _ = writeln!(s, "rho              {}", format_rational(&r.conformal_weight));
    if !r.sector_weights.is_empty() {
        let w: Vec<String> = r.sector_weights.iter().map(|(i, w)| format!("{i}: {}", format_rational(w))).collect();
        let _ = writeln!(s, "twisted weights  {}", w.join(", "));
    }
    let _ = writeln!(s, "trunc weight     {}", r.trunc_weight);
    let _ = writeln!(s, "character        {}", r.character);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>3}  dim V_k", "k");
    for (k, v) in &r.dims {
        let _ = writeln!(s, "{k:>3}  {v}");
    }
    s
}

pub fn render_json(r: &OrbifoldReport) -> Value {
    let dims: BTreeMap<String, Value> = r.dims.iter().map(|(k, v)| (k.to_string(), big(v))).collect();
    let coeffs: BTreeMap<String, Value> = r.character.terms.iter().map(|(e, v)| (e.to_string(), big(v))).collect();
    let weights: BTreeMap<String, String> = r.sector_weights.iter().map(|(i, w)| (i.to_string(), format_rational(w))).collect();
    json!({
        "central_charge": r.central_charge,
        "cycle_type": r.cycle_type.to_string(),
        "order": r.order,
        "case": r.case,
        "type": r.orbifold_type,
        "conformal_weight": format_rational(&r.conformal_weight),
        "conformal_weights": weights,
        "trunc_weight": r.trunc_weight,
        "character": r.character.to_string(),
        "character_coefficients": coeffs,
        "character_trunc": r.character.trunc,
        "dims": dims,
    })
}
