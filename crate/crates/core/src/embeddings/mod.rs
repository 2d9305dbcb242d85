//! Node embeddings and the decoders that turn them into link scores.
//!
//! Four methods are provided: Laplacian Eigenmaps ([`embed_laplacian_eigenmaps`]),
//! Graph Factorization ([`embed_graph_factorization`]), HOPE ([`embed_hope`])
//! and SDNE ([`embed_sdne`]). Each returns an [`EmbeddingResult`] whose decoder
//! scores any pair of nodes.

mod factorization;
mod hope;
mod laplacian;
mod sdne;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_node, Error, Result};
use crate::graph::{Graph, Pair};
use crate::numerics::DenseMatrix;
use crate::ranking::{rank_pairs, ScoreMatrix};
use crate::split::EdgeSplit;

pub use factorization::{embed_graph_factorization, gf_objective, GfParams};
pub use hope::{embed_hope, katz_matrix, HopeParams};
pub use laplacian::{embed_laplacian_eigenmaps, embed_laplacian_eigenmaps_lcc, normalized_laplacian};
pub use sdne::{embed_sdne, SdneNetwork, SdneParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMethod {
    LaplacianEigenmaps,
    GraphFactorization,
    Hope,
    Sdne,
}

impl EmbeddingMethod {
    pub const ALL: [EmbeddingMethod; 4] = [
        EmbeddingMethod::LaplacianEigenmaps,
        EmbeddingMethod::GraphFactorization,
        EmbeddingMethod::Hope,
        EmbeddingMethod::Sdne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmbeddingMethod::LaplacianEigenmaps => "le",
            EmbeddingMethod::GraphFactorization => "gf",
            EmbeddingMethod::Hope => "hope",
            EmbeddingMethod::Sdne => "sdne",
        }
    }

    pub fn default_decoder(self) -> Decoder {
        match self {
            EmbeddingMethod::LaplacianEigenmaps => Decoder::NegSqDistance,
            EmbeddingMethod::GraphFactorization | EmbeddingMethod::Hope => Decoder::InnerProduct,
            EmbeddingMethod::Sdne => Decoder::Reconstruction,
        }
    }

    /// Methods whose embedding at dimension `d` is the leading block of the
    /// embedding at any larger dimension.
    pub fn is_nested(self) -> bool {
        matches!(self, EmbeddingMethod::LaplacianEigenmaps | EmbeddingMethod::Hope)
    }
}

impl fmt::Display for EmbeddingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmbeddingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmbeddingMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown embedding method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    InnerProduct,
    NegSqDistance,
    Reconstruction,
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::InnerProduct => "inner_product",
            Decoder::NegSqDistance => "neg_sq_distance",
            Decoder::Reconstruction => "reconstruction",
        })
    }
}

/// Hyperparameters for every method; unused sections are ignored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    pub gf: GfParams,
    pub hope: HopeParams,
    pub sdne: SdneParams,
}

impl MethodParams {
    pub fn validate(&self) -> Result<()> {
        self.gf.validate()?;
        self.hope.validate()?;
        self.sdne.validate()
    }

    /// Compact `key=value` rendering of the parameters `method` uses.
    pub fn snapshot(&self, method: EmbeddingMethod) -> String {
        match method {
            EmbeddingMethod::LaplacianEigenmaps => String::new(),
            EmbeddingMethod::GraphFactorization => {
                let p = &self.gf;
                format!(
                    "lr={};epochs={};lambda={};init_scale={};lr_halving_every={}",
                    p.learning_rate, p.epochs, p.reg_lambda, p.init_scale, p.lr_halving_every
                )
            }
            EmbeddingMethod::Hope => format!("beta_factor={}", self.hope.beta_factor),
            EmbeddingMethod::Sdne => {
                let p = &self.sdne;
                let hidden: Vec<String> = p.hidden_layers.iter().map(|h| h.to_string()).collect();
                format!(
                    "hidden={};alpha={};beta={};nu={};lr={};epochs={};batch={}",
                    hidden.join("-"),
                    p.alpha,
                    p.beta_penalty,
                    p.reg_nu,
                    p.learning_rate,
                    p.epochs,
                    p.batch_size
                )
            }
        }
    }
}

/// Node coordinates produced by one method.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    y: DenseMatrix,
    y_target: Option<DenseMatrix>,
    reconstruction: Option<DenseMatrix>,
    method: EmbeddingMethod,
    decoder: Decoder,
    d: usize,
    /// Objective value after each training epoch (empty for closed-form methods).
    pub training_log: Vec<f64>,
    /// Eigenvalues (LE) or singular values (HOPE) behind each embedding column.
    pub spectrum: Vec<f64>,
}

impl EmbeddingResult {
    pub(crate) fn new(
        method: EmbeddingMethod,
        d: usize,
        y: DenseMatrix,
        y_target: Option<DenseMatrix>,
        reconstruction: Option<DenseMatrix>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("embedding dimension must be at least 1"));
        }
        if y_target.is_some() != (method == EmbeddingMethod::Hope) {
            return Err(Error::validation("a target embedding accompanies HOPE and only HOPE"));
        }
        let parts = [Some(&y), y_target.as_ref(), reconstruction.as_ref()];
        if parts.iter().flatten().any(|m| !m.is_finite()) {
            return Err(Error::numeric(format!("{method} produced non-finite coordinates")));
        }
        Ok(EmbeddingResult {
            y,
            y_target,
            reconstruction,
            method,
            decoder: method.default_decoder(),
            d,
            training_log: Vec::new(),
            spectrum: Vec::new(),
        })
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    pub fn y_target(&self) -> Option<&DenseMatrix> {
        self.y_target.as_ref()
    }

    /// The autoencoder's reconstructed adjacency (SDNE only).
    pub fn reconstruction(&self) -> Option<&DenseMatrix> {
        self.reconstruction.as_ref()
    }

    pub fn method(&self) -> EmbeddingMethod {
        self.method
    }

    pub fn decoder(&self) -> Decoder {
        self.decoder
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.y.rows()
    }

    /// Replaces the method's default decoder.
    pub fn with_decoder(mut self, decoder: Decoder) -> Result<Self> {
        if decoder == Decoder::Reconstruction && self.reconstruction.is_none() {
            return Err(Error::validation(format!(
                "{} has no reconstruction to decode from",
                self.method
            )));
        }
        self.decoder = decoder;
        Ok(self)
    }

    pub fn link_score(&self, u: usize, v: usize) -> Result<f64> {
        check_node(u, self.n())?;
        check_node(v, self.n())?;
        if u == v {
            return Err(Error::validation(format!("pair ({u}, {v}) is not two distinct nodes")));
        }
        Ok(self.score_unchecked(u, v))
    }

    fn score_unchecked(&self, u: usize, v: usize) -> f64 {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match self.decoder {
            Decoder::InnerProduct => match &self.y_target {
                Some(t) => 0.5 * (dot(self.y.row(u), t.row(v)) + dot(self.y.row(v), t.row(u))),
                None => dot(self.y.row(u), self.y.row(v)),
            },
            Decoder::NegSqDistance => -self
                .y
                .row(u)
                .iter()
                .zip(self.y.row(v))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>(),
            Decoder::Reconstruction => {
                let x = self.reconstruction.as_ref().expect("checked at construction");
                0.5 * (x[(u, v)] + x[(v, u)])
            }
        }
    }

    pub fn score_matrix(&self) -> ScoreMatrix {
        ScoreMatrix::from_fn(self.n(), |u, v| self.score_unchecked(u, v))
    }

    /// The embedding this method would produce at the smaller dimension `d`;
    /// only defined for nested (spectral) methods.
    pub fn truncated(&self, d: usize) -> Result<EmbeddingResult> {
        if !self.method.is_nested() {
            return Err(Error::validation(format!("{} embeddings are not nested", self.method)));
        }
        if d == 0 || d > self.d {
            return Err(Error::Bounds { index: d, limit: self.d });
        }
        let cols = match self.method {
            EmbeddingMethod::Hope => hope::side_width(d),
            _ => d,
        };
        let mut out = self.clone();
        out.d = d;
        out.y = self.y.leading_columns(cols);
        out.y_target = self.y_target.as_ref().map(|t| t.leading_columns(cols));
        out.spectrum.truncate(cols);
        Ok(out)
    }

    /// Text matrix: a `n d method` header, then one row of coordinates per node
    /// (source and target halves side by side for HOPE).
    pub fn write_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.n(), self.d, self.method)?;
        for u in 0..self.n() {
            let mut row: Vec<String> = self.y.row(u).iter().map(|x| format!("{x:e}")).collect();
            if let Some(t) = &self.y_target {
                row.extend(t.row(u).iter().map(|x| format!("{x:e}")));
            }
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

/// Reads back the coordinate block written by [`EmbeddingResult::write_text`]
/// as `(n, d, method, rows)`.
pub fn parse_embedding_text(text: &str) -> Result<(usize, usize, EmbeddingMethod, Vec<Vec<f64>>)> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: "<embedding>".into(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, d, method] = fields[..] else {
        return Err(parse_err(1, format!("expected `n d method`, got `{header}`")));
    };
    let n: usize = n.parse().map_err(|_| parse_err(1, format!("bad node count `{n}`")))?;
    let d: usize = d.parse().map_err(|_| parse_err(1, format!("bad dimension `{d}`")))?;
    let method: EmbeddingMethod = method.parse()?;
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            line.split_whitespace()
                .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(i + 2, format!("bad number `{tok}`"))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(parse_err(rows.len() + 1, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok((n, d, method, rows))
}

/// Runs `method` on `train` with the given parameters and seed.
pub fn embed(
    method: EmbeddingMethod,
    train: &Graph,
    d: usize,
    params: &MethodParams,
    seed: u64,
) -> Result<EmbeddingResult> {
    match method {
        EmbeddingMethod::LaplacianEigenmaps => embed_laplacian_eigenmaps(train, d),
        EmbeddingMethod::GraphFactorization => embed_graph_factorization(train, d, &params.gf, seed),
        EmbeddingMethod::Hope => embed_hope(train, d, &params.hope),
        EmbeddingMethod::Sdne => embed_sdne(train, d, &params.sdne, seed),
    }
}

pub fn rank_candidates_embedding(
    embedding: &EmbeddingResult,
    split: &EdgeSplit,
    top_k: Option<usize>,
) -> Result<Vec<(Pair, f64)>> {
    if embedding.n() != split.n() {
        return Err(Error::validation(format!(
            "embedding covers {} nodes but the split has {}",
            embedding.n(),
            split.n()
        )));
    }
    Ok(rank_pairs(split, &embedding.score_matrix(), top_k))
}
