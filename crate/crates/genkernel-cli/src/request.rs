//! Validated evaluation requests and the records they produce.

use crate::json::{format_number, Json};
use genkernel::kernel_dunkl::{
    dunkl_bessel_evaluate, dunkl_evaluate, dunkl_series, BesselMethod, DihedralParams, DihedralPoint, DunklMethod,
};
use genkernel::kernel_fourier::{evaluate, FourierParams, Method};
use genkernel::laplace_rational::GeomInvariants;
use genkernel::Error;
use num_complex::Complex64;
use std::fmt;

/// A failed command, split by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn to_json(&self) -> Json {
        let (kind, msg) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Numeric(m) => ("numeric", m),
        };
        Json::obj([(
            "error",
            Json::obj([("kind", Json::str(kind)), ("code", Json::Int(self.exit_code() as i64)), ("message", Json::str(msg.clone()))]),
        )])
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    Fourier,
    Dunkl,
    DunklBessel,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Fourier => "fourier",
            KernelKind::Dunkl => "dunkl",
            KernelKind::DunklBessel => "dunkl-bessel",
        }
    }
}

/// Parses `a` as a decimal or as `p/q`. `2/n` is kept exact so that the
/// half-integer closed forms are selected.
pub fn parse_fourier(a: &str, m: u32, method: &str) -> Result<FourierParams, Failure> {
    let method: Method = method.parse()?;
    let a = a.trim();
    if let Some((p, q)) = a.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| Failure::Usage(format!("invalid numerator in --a {a}")))?;
        let q: f64 = q.trim().parse().map_err(|_| Failure::Usage(format!("invalid denominator in --a {a}")))?;
        if q == 0.0 {
            return usage(format!("zero denominator in --a {a}"));
        }
        if p == 2.0 && q >= 1.0 && q.fract() == 0.0 && q < 1e6 {
            return Ok(FourierParams::half_integer(q as u32, m, method)?);
        }
        return Ok(FourierParams::new(p / q, m, method)?);
    }
    let v: f64 = a.parse().map_err(|_| Failure::Usage(format!("invalid --a {a}")))?;
    Ok(FourierParams::new(v, m, method)?)
}

/// Accepts `I4`, `i4` or `4`.
pub fn parse_group(group: &str, alpha: f64, beta: Option<f64>) -> Result<DihedralParams, Failure> {
    let digits = group.trim().trim_start_matches(['I', 'i']);
    let order: u32 = digits.parse().map_err(|_| Failure::Usage(format!("invalid --group {group} (expected I<order>)")))?;
    Ok(DihedralParams::from_order(order, alpha, beta)?)
}

/// A fully validated kernel with its method.
#[derive(Debug, Clone, Copy)]
pub enum Kernel {
    Fourier { params: FourierParams, tol: f64 },
    Dunkl { params: DihedralParams, method: DunklMethod, tol: f64 },
    Bessel { params: DihedralParams, method: BesselMethod },
}

/// Where a kernel is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Vectors { x: Vec<f64>, y: Vec<f64> },
    Reduced { z: f64, xi: f64 },
    Polar { z1: DihedralPoint, z2: DihedralPoint },
}

/// One evaluated value with its inputs, derived geometry and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kernel: &'static str,
    pub params: Vec<(&'static str, Json)>,
    pub inputs: Vec<(&'static str, Json)>,
    pub z: f64,
    pub xi: f64,
    pub q: f64,
    pub value: Complex64,
    pub method: String,
    pub err_est: f64,
}

fn vec_json(v: &[f64]) -> Json {
    Json::Arr(v.iter().map(|&x| Json::Num(x)).collect())
}

impl Kernel {
    pub fn kind(&self) -> KernelKind {
        match self {
            Kernel::Fourier { .. } => KernelKind::Fourier,
            Kernel::Dunkl { .. } => KernelKind::Dunkl,
            Kernel::Bessel { .. } => KernelKind::DunklBessel,
        }
    }

    fn param_fields(&self) -> Vec<(&'static str, Json)> {
        match self {
            Kernel::Fourier { params, .. } => vec![
                ("a", Json::Num(params.a)),
                ("n", params.n.map_or(Json::Null, |n| Json::Int(n as i64))),
                ("m", Json::Int(params.m as i64)),
            ],
            Kernel::Dunkl { params, .. } | Kernel::Bessel { params, .. } => vec![
                ("group", Json::str(params.name())),
                ("alpha", Json::Num(params.alpha)),
                ("beta", Json::opt_num(params.beta)),
            ],
        }
    }

    /// Evaluates at one point; the point form must suit the kernel.
    pub fn eval(&self, point: &Point) -> Result<Record, Failure> {
        match self {
            Kernel::Fourier { params, tol } => {
                let (geom, inputs) = match point {
                    Point::Vectors { x, y } => {
                        if x.len() as u32 != params.m {
                            return usage(format!("vectors have dimension {} but --m is {}", x.len(), params.m));
                        }
                        (GeomInvariants::from_vectors(x, y)?, vec![("x", vec_json(x)), ("y", vec_json(y))])
                    }
                    Point::Reduced { z, xi } => (GeomInvariants::new(*z, *xi, params.m)?, vec![]),
                    Point::Polar { .. } => return usage("the fourier kernel takes --x/--y or --z/--xi"),
                };
                let e = evaluate(params, &geom, *tol)?;
                Ok(Record {
                    kernel: self.kind().as_str(),
                    params: self.param_fields(),
                    inputs,
                    z: geom.z,
                    xi: geom.xi,
                    q: geom.q,
                    value: e.value,
                    method: e.route.as_str().to_string(),
                    err_est: e.error,
                })
            }
            Kernel::Dunkl { params, .. } | Kernel::Bessel { params, .. } => {
                let (z1, z2, mut inputs) = match point {
                    Point::Vectors { x, y } => {
                        if x.len() != 2 || y.len() != 2 {
                            return usage("dihedral kernels take planar vectors --x x1,x2 --y y1,y2");
                        }
                        let z1 = DihedralPoint::from_complex(Complex64::new(x[0], x[1]));
                        let z2 = DihedralPoint::from_complex(Complex64::new(y[0], y[1]));
                        (z1, z2, vec![("x", vec_json(x)), ("y", vec_json(y))])
                    }
                    Point::Polar { z1, z2 } => (*z1, *z2, vec![]),
                    Point::Reduced { .. } => return usage("dihedral kernels take --x/--y or --r1/--phi1/--r2/--phi2"),
                };
                inputs.extend([
                    ("r1", Json::Num(z1.modulus)),
                    ("phi1", Json::Num(z1.angle)),
                    ("r2", Json::Num(z2.modulus)),
                    ("phi2", Json::Num(z2.angle)),
                ]);
                let e = match self {
                    Kernel::Dunkl { method: DunklMethod::Series, tol, .. } => dunkl_series(params, &z1, &z2, 1.0, *tol)?,
                    Kernel::Dunkl { method, .. } => dunkl_evaluate(params, &z1, &z2, *method)?,
                    Kernel::Bessel { method, .. } => dunkl_bessel_evaluate(params, &z1, &z2, *method)?,
                    Kernel::Fourier { .. } => unreachable!(),
                };
                let theta3 = (z1.angle - z2.angle).cos();
                Ok(Record {
                    kernel: self.kind().as_str(),
                    params: self.param_fields(),
                    inputs,
                    z: z1.modulus * z2.modulus,
                    xi: theta3,
                    q: theta3.clamp(-1.0, 1.0).acos(),
                    value: e.value,
                    method: e.route.as_str().to_string(),
                    err_est: e.error,
                })
            }
        }
    }
}

impl Record {
    pub fn to_json(&self) -> Json {
        let mut fields = vec![("kernel".to_string(), Json::str(self.kernel))];
        fields.push(("params".into(), Json::obj(self.params.iter().cloned())));
        fields.push(("inputs".into(), Json::obj(self.inputs.iter().cloned())));
        fields.push((
            "geometry".into(),
            Json::obj([("z", Json::Num(self.z)), ("xi", Json::Num(self.xi)), ("q", Json::Num(self.q))]),
        ));
        fields.push((
            "value".into(),
            Json::obj([
                ("re", Json::Num(self.value.re)),
                ("im", Json::Num(self.value.im)),
                ("abs", Json::Num(self.value.norm())),
            ]),
        ));
        fields.push(("method".into(), Json::str(self.method.clone())));
        fields.push(("err_est".into(), Json::Num(self.err_est)));
        Json::Obj(fields)
    }

    /// Column names: kernel, the parameters, the dihedral point coordinates
    /// when present, then the fixed value columns.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["kernel".to_string()];
        h.extend(self.params.iter().map(|(k, _)| k.to_string()));
        h.extend(self.polar_inputs().map(|(k, _)| k.to_string()));
        h.extend(["z", "xi", "re", "im", "abs", "method", "err_est"].map(String::from));
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        let mut r = vec![self.kernel.to_string()];
        r.extend(self.params.iter().map(|(_, v)| cell(v)));
        r.extend(self.polar_inputs().map(|(_, v)| cell(v)));
        r.extend([self.z, self.xi, self.value.re, self.value.im, self.value.norm()].map(format_number));
        r.push(self.method.clone());
        r.push(format_number(self.err_est));
        r
    }

    fn polar_inputs(&self) -> impl Iterator<Item = &(&'static str, Json)> {
        self.inputs.iter().filter(|(k, _)| matches!(*k, "r1" | "phi1" | "r2" | "phi2"))
    }
}

fn cell(v: &Json) -> String {
    match v {
        Json::Null => String::new(),
        Json::Num(x) => format_number(*x),
        Json::Int(i) => i.to_string(),
        Json::Str(s) => s.clone(),
        other => other.render().trim().to_string(),
    }
}
