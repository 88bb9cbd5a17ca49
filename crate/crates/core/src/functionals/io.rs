//! Versioned plain-text model files.
//!
//! ```text
//! rankforge-model v1 linear <m>
//! <bias>
//! <w_1> ... one per line ... <w_m>
//!
//! rankforge-model v1 quad <m> <k>
//! <bias>
//! <w_1> ... <w_m>
//! <a> <b> <c_ab>            k lines, pairs ascending
//!
//! rankforge-model v1 bilinear <d> <n1> <n2> <sigmoid|tanh>
//! rankforge-model v1 metric <d> <n1> <n2> <tau>
//! A row-major (d * n1 lines), then B row-major (d * n2 lines)
//! ```
//!
//! Values use the shortest decimal representation that parses back to the
//! same bits.

use std::io::{BufRead, Write};

use super::{BilinearSigmoidModel, Matrix, MetricModel, Model, QuadraticModel, Squash};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MODEL_MAGIC: &str = "rankforge-model";
const VERSION: &str = "v1";

pub fn write_model<T: Scalar>(model: &Model<T>, mut out: impl Write) -> Result<()> {
    match model {
        Model::Linear(m) => {
            writeln!(out, "{MODEL_MAGIC} {VERSION} linear {}", m.weights.len())?;
            writeln!(out, "{}", m.bias)?;
            for w in &m.weights {
                writeln!(out, "{w}")?;
            }
        }
        Model::Quadratic(m) => {
            writeln!(
                out,
                "{MODEL_MAGIC} {VERSION} quad {} {}",
                m.weights.len(),
                m.pairs.len()
            )?;
            writeln!(out, "{}", m.bias)?;
            for w in &m.weights {
                writeln!(out, "{w}")?;
            }
            for (&(a, b), c) in m.pairs.iter().zip(&m.pair_weights) {
                writeln!(out, "{a} {b} {c}")?;
            }
        }
        Model::Bilinear(m) => {
            writeln!(
                out,
                "{MODEL_MAGIC} {VERSION} bilinear {} {} {} {}",
                m.a.rows,
                m.a.cols,
                m.b.cols,
                m.squash.name()
            )?;
            write_matrices(&mut out, &m.a, &m.b)?;
        }
        Model::Metric(m) => {
            writeln!(
                out,
                "{MODEL_MAGIC} {VERSION} metric {} {} {} {}",
                m.a.rows, m.a.cols, m.b.cols, m.tau
            )?;
            write_matrices(&mut out, &m.a, &m.b)?;
        }
    }
    Ok(())
}

fn write_matrices<T: Scalar>(out: &mut impl Write, a: &Matrix<T>, b: &Matrix<T>) -> Result<()> {
    for v in a.data.iter().chain(&b.data) {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?.trim_end_matches('\r').to_string()),
            None => Err(Error::ModelFormat(format!("unexpected end of file at line {}", self.line))),
        }
    }

    fn scalar<T: Scalar>(&mut self) -> Result<T> {
        let l = self.next_line()?;
        parse_num(l.trim(), self.line)
    }
}

fn parse_num<N: std::str::FromStr>(tok: &str, line: usize) -> Result<N> {
    tok.parse()
        .map_err(|_| Error::ModelFormat(format!("line {line}: bad number `{tok}`")))
}

pub fn read_model<T: Scalar>(input: impl BufRead) -> Result<Model<T>> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.next_line()?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 3 || toks[0] != MODEL_MAGIC {
        return Err(Error::ModelFormat("missing rankforge-model header".into()));
    }
    if toks[1] != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version `{}`", toks[1])));
    }
    let arity = |n: usize| -> Result<()> {
        if toks.len() != 3 + n {
            return Err(Error::ModelFormat(format!(
                "`{}` header takes {n} fields",
                toks[2]
            )));
        }
        Ok(())
    };
    let model = match toks[2] {
        "linear" => {
            arity(1)?;
            let m: usize = parse_num(toks[3], 1)?;
            let mut model = Model::linear(m);
            let theta = (0..=m).map(|_| lines.scalar()).collect::<Result<Vec<T>>>()?;
            model.set_params(&theta)?;
            model
        }
        "quad" => {
            arity(2)?;
            let m: usize = parse_num(toks[3], 1)?;
            let k: usize = parse_num(toks[4], 1)?;
            let mut theta = (0..=m).map(|_| lines.scalar()).collect::<Result<Vec<T>>>()?;
            let mut pairs = Vec::with_capacity(k);
            for _ in 0..k {
                let l = lines.next_line()?;
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(Error::ModelFormat(format!(
                        "line {}: expected `<a> <b> <coefficient>`",
                        lines.line
                    )));
                }
                pairs.push((parse_num(f[0], lines.line)?, parse_num(f[1], lines.line)?));
                theta.push(parse_num(f[2], lines.line)?);
            }
            let mut model = Model::Quadratic(QuadraticModel::new(m, pairs)?);
            model.set_params(&theta)?;
            model
        }
        "bilinear" | "metric" => {
            arity(4)?;
            let d: usize = parse_num(toks[3], 1)?;
            let n1: usize = parse_num(toks[4], 1)?;
            let n2: usize = parse_num(toks[5], 1)?;
            let mut model = if toks[2] == "bilinear" {
                let squash = match toks[6] {
                    "sigmoid" => Squash::Sigmoid,
                    "tanh" => Squash::Tanh,
                    other => return Err(Error::ModelFormat(format!("unknown squash `{other}`"))),
                };
                Model::Bilinear(BilinearSigmoidModel {
                    a: Matrix::zeros(d, n1),
                    b: Matrix::zeros(d, n2),
                    squash,
                })
            } else {
                let tau: T = parse_num(toks[6], 1)?;
                Model::Metric(MetricModel {
                    a: Matrix::zeros(d, n1),
                    b: Matrix::zeros(d, n2),
                    tau,
                })
            };
            let theta = (0..d * (n1 + n2))
                .map(|_| lines.scalar())
                .collect::<Result<Vec<T>>>()?;
            model.set_params(&theta)?;
            model
        }
        other => return Err(Error::ModelFormat(format!("unknown family `{other}`"))),
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn round_trip<T: Scalar>(m: &Model<T>) -> (Model<T>, Vec<u8>) {
        let mut buf = Vec::new();
        write_model(m, &mut buf).unwrap();
        (read_model(buf.as_slice()).unwrap(), buf)
    }

    #[test]
    fn header_lines() {
        let m = Model::<f64>::linear(2);
        let (_, buf) = round_trip(&m);
        assert_eq!(String::from_utf8(buf).unwrap(), "rankforge-model v1 linear 2\n0\n0\n0\n");
        let m = Model::<f64>::metric(1, 1, 2, 0.5).unwrap();
        let (_, buf) = round_trip(&m);
        assert!(String::from_utf8(buf).unwrap().starts_with("rankforge-model v1 metric 1 1 2 0.5\n"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_model::<f64>("hello\n".as_bytes()).is_err());
        assert!(read_model::<f64>("rankforge-model v2 linear 1\n0\n0\n".as_bytes()).is_err());
        assert!(read_model::<f64>("rankforge-model v1 linear 2\n0\n0\n".as_bytes()).is_err());
        assert!(read_model::<f64>("rankforge-model v1 cubic 2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn bit_exact_round_trip(theta in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 11)) {
            let quad = Model::<f64>::quadratic(3, vec![(1, 1), (2, 3)]).unwrap();
            let m = quad.with_params(&theta[..6]).unwrap();
            let (back, _) = round_trip(&m);
            let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
            prop_assert_eq!(bits(back.params()), bits(m.params()));

            let bil = Model::<f64>::bilinear(1, 2, 3, Squash::Tanh).unwrap().with_params(&theta[6..]).unwrap();
            let (back, _) = round_trip(&bil);
            prop_assert_eq!(&back, &bil);
        }

        #[test]
        fn bit_exact_round_trip_f32(theta in proptest::collection::vec(proptest::num::f32::NORMAL, 4)) {
            let m = Model::<f32>::linear(3).with_params(&theta).unwrap();
            let (back, _) = round_trip(&m);
            let bits = |v: Vec<f32>| v.into_iter().map(f32::to_bits).collect::<Vec<_>>();
            prop_assert_eq!(bits(back.params()), bits(m.params()));
        }
    }
}
