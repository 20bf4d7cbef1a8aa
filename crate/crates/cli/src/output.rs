//! CSV and JSON writers. Floats are printed with 17 significant digits in
//! CSV and in shortest round-trip form in JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

use circle_wigner::{CurvePoint, StateParams, Variant, WignerGrid};

pub const SCHEMA: &str = "circle-wigner v1";

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn state_header(w: &mut dyn Write, variant: Variant, p: &StateParams) -> io::Result<()> {
    writeln!(
        w,
        "# {SCHEMA}; variant={}; lambda={}; l={}; eps={}; theta_bar={}",
        variant.as_str(),
        num(p.lambda),
        p.l,
        num(p.eps),
        num(p.theta_bar)
    )
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct GridDoc<'a> {
    schema: &'static str,
    variant: Variant,
    state: &'a StateParams,
    theta: &'a [f64],
    p: &'a [f64],
    values: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct SeriesDoc<'a> {
    schema: &'static str,
    variant: Variant,
    state: &'a StateParams,
    axis: &'a str,
    x: Vec<f64>,
    value: Vec<f64>,
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    schema: &'static str,
    eps: f64,
    l: i64,
    points: &'a [CurvePoint],
}

fn write_json<T: Serialize>(w: &mut dyn Write, doc: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, doc)?;
    writeln!(w)
}

pub fn write_grid(w: &mut dyn Write, format: Format, grid: &WignerGrid) -> io::Result<()> {
    match format {
        Format::Csv => {
            state_header(w, grid.variant, &grid.state)?;
            writeln!(w, "theta,p,value")?;
            for (theta, row) in grid.theta_values.iter().zip(&grid.values) {
                for (p, v) in grid.p_values.iter().zip(row) {
                    writeln!(w, "{},{},{}", num(*theta), num(*p), num(*v))?;
                }
            }
            Ok(())
        }
        Format::Json => write_json(
            w,
            &GridDoc {
                schema: SCHEMA,
                variant: grid.variant,
                state: &grid.state,
                theta: &grid.theta_values,
                p: &grid.p_values,
                values: &grid.values,
            },
        ),
    }
}

pub fn write_series(
    w: &mut dyn Write,
    format: Format,
    variant: Variant,
    state: &StateParams,
    axis: &str,
    points: &[(f64, f64)],
) -> io::Result<()> {
    match format {
        Format::Csv => {
            state_header(w, variant, state)?;
            writeln!(w, "# axis={axis}")?;
            writeln!(w, "x,value")?;
            for (x, v) in points {
                writeln!(w, "{},{}", num(*x), num(*v))?;
            }
            Ok(())
        }
        Format::Json => write_json(
            w,
            &SeriesDoc {
                schema: SCHEMA,
                variant,
                state,
                axis,
                x: points.iter().map(|p| p.0).collect(),
                value: points.iter().map(|p| p.1).collect(),
            },
        ),
    }
}

pub fn write_curve(w: &mut dyn Write, format: Format, eps: f64, l: i64, points: &[CurvePoint]) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "# {SCHEMA}; eps={}; l={l}", num(eps))?;
            writeln!(w, "lambda,delta_l,delta_theta_full,delta_theta_half")?;
            for p in points {
                writeln!(
                    w,
                    "{},{},{},{}",
                    num(p.lambda),
                    num(p.delta_l),
                    num(p.delta_theta_full),
                    num(p.delta_theta_half)
                )?;
            }
            Ok(())
        }
        Format::Json => write_json(
            w,
            &CurveDoc {
                schema: SCHEMA,
                eps,
                l,
                points,
            },
        ),
    }
}
