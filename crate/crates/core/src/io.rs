//! Plot-ready CSV and JSON output. Reals are written with 17 significant
//! digits so files are byte-identical across runs.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::flow::Trajectory;
use crate::portrait::{PortraitRow, PORTRAIT_HEADER};
use crate::sweep::SweepRow;

pub const TRAJECTORY_HEADER: &str = "t,x1,x2,y,R,kappa,first_integral";

pub const SWEEP_HEADER: &str = "index,y0,regime,outcome,singular_type,t_estimate,ancient_exists,\
ancient_type,forward_y_limit,backward_y_limit,matches_prediction,error";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// The serialized name of a unit enum variant.
pub fn variant_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn opt_name<T: Serialize>(v: &Option<T>) -> String {
    v.as_ref().map(variant_name).unwrap_or_default()
}

/// Quotes a field when it contains a comma, quote or line break.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_trajectory_csv(mut w: impl Write, traj: &Trajectory) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in &traj.samples {
        let st = s.state;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            real(st.t),
            real(st.x1),
            real(st.x2),
            real(st.y()),
            real(s.r),
            real(s.kappa),
            opt_real(s.first_integral)
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv(mut w: impl Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            real(r.y0),
            field(r.regime.as_deref().unwrap_or_default()),
            opt_name(&r.outcome),
            opt_name(&r.singular_type),
            opt_real(r.t_estimate),
            r.ancient_exists.map(|b| b.to_string()).unwrap_or_default(),
            opt_name(&r.ancient_type),
            opt_real(r.forward_y_limit),
            opt_real(r.backward_y_limit),
            r.matches_prediction.map(|b| b.to_string()).unwrap_or_default(),
            field(r.error.as_deref().unwrap_or_default()),
        )?;
    }
    Ok(())
}

pub fn write_portrait_csv(mut w: impl Write, rows: &[PortraitRow]) -> Result<()> {
    writeln!(w, "{PORTRAIT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            real(r.x1),
            real(r.x2),
            real(r.dx1),
            real(r.dx2),
            real(r.dy),
            r.r_sign,
            r.region.label()
        )?;
    }
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::classify::ForwardOutcome;
    use crate::flow::{integrate, IntegrationOptions, MetricState};
    use crate::space::FlowCoefficients;

    #[test]
    fn seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(1.0), "1.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn trajectory_csv_shape() {
        let c = FlowCoefficients::derive(&catalog::fix_a()).unwrap();
        let t = integrate(&c, MetricState::from_ratio(0.75, 1.0), &IntegrationOptions::forward())
            .unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
        assert_eq!(lines.clone().count(), t.len());
        assert!(lines.all(|l| l.split(',').count() == 7));
    }

    #[test]
    fn names_and_quoting() {
        assert_eq!(variant_name(&ForwardOutcome::FiberCollapse), "FiberCollapse");
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("plain"), "plain");
        assert_eq!(field("say \"x\", y"), "\"say \"\"x\"\", y\"");
    }
}
