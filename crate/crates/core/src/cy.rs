//! Two-torus models of weighted projective Calabi–Yau complete intersections and their
//! spherical-twist mutation words.

use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::catalog::torus1;
use crate::error::{Error, Result};
use crate::groupoid::{mutation_transcript, Path, Transcript};
use crate::linalg::{q, Rat, Weight};
use crate::mutation::{module_of_window, mutate, mutation_word, Direction, MutationStep, MutationWord, ToricWall};
use crate::rep::QSRep;
use crate::windows::window;

#[derive(Debug, Clone)]
pub struct CYModel {
    pub a: Vec<i64>,
    pub d: Vec<i64>,
    pub alpha: i64,
    /// `x₀, x_i, y₀, y_j` graded by the two factors.
    pub bigraded_weights: Vec<[i64; 2]>,
    pub g1_rep: QSRep,
    pub arrangement: Arrangement,
    /// Walls sit at `offset + ℤ`.
    pub arrangement_offset: Rat,
}

impl CYModel {
    pub fn build(a: &[i64], d: &[i64]) -> Result<CYModel> {
        if a.is_empty() || d.is_empty() || a.iter().chain(d).any(|&x| x <= 0) {
            return Err(Error::InvalidInput("degrees and weights must be positive and nonempty".into()));
        }
        let (sa, sd): (i64, i64) = (a.iter().sum(), d.iter().sum());
        if sa != sd {
            return Err(Error::InvalidInput(format!("Calabi–Yau condition fails: Σd = {sd} but Σa = {sa}")));
        }
        let mut bigraded_weights = vec![[1, 0]];
        bigraded_weights.extend(a.iter().map(|&x| [x, 0]));
        bigraded_weights.push([-1, 1]);
        bigraded_weights.extend(d.iter().map(|&x| [-x, 1]));
        let g1: Vec<i64> = bigraded_weights.iter().map(|w| w[0]).collect();
        let g1_rep = torus1(&g1)?;
        let arrangement = Arrangement::build(&g1_rep)?;
        let walls = arrangement.walls_in_box(&[q(0)], &[q(1)]);
        let offsets: Vec<Rat> = walls.iter().map(|w| w.value / q(w.normal[0])).filter(|v| *v < q(1)).collect();
        let [offset] = offsets.as_slice() else {
            return Err(Error::Inconsistent(format!("expected one wall per period, got {offsets:?}")));
        };
        let expected = if sa % 2 == 0 { Rat::new(1, 2) } else { q(0) };
        if *offset != expected {
            return Err(Error::Inconsistent(format!("wall offset {offset} contradicts the parity of α = {sa}")));
        }
        Ok(CYModel { a: a.to_vec(), d: d.to_vec(), alpha: sa, bigraded_weights, g1_rep, arrangement, arrangement_offset: *offset })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn r(&self) -> usize {
        self.d.len()
    }

    pub fn arrangement_name(&self) -> &'static str {
        if self.arrangement_offset == q(0) {
            "Z"
        } else {
            "Z+1/2"
        }
    }

    /// A point in the chamber just above the wall at `offset + k`.
    fn above(&self, k: i64) -> Rat {
        self.arrangement_offset + q(k) + Rat::new(1, 2)
    }

    /// `|C_δ|` in the chamber above the wall `offset + k`.
    pub fn window_size(&self, k: i64) -> Result<usize> {
        Ok(window(&self.g1_rep, &self.arrangement, &[self.above(k)])?.chars.len())
    }

    /// `(d⁺, d⁻)`: the `d_F⁺` of the upward and the downward crossing of `wall`.
    pub fn crossing_data(&self, wall: Rat) -> Result<(usize, usize)> {
        let lo = [wall - Rat::new(1, 2)];
        let hi = [wall + Rat::new(1, 2)];
        if !self.arrangement.is_adjacent(&lo, &hi)? || !self.arrangement.is_on_wall(&[wall])? {
            return Err(Error::InvalidInput(format!("{wall} is not a wall")));
        }
        let up = ToricWall::new(&self.g1_rep, &self.arrangement, &lo, &hi)?;
        Ok((up.face.d_plus, up.dual_face.d_plus))
    }

    /// `δ = m + α/2 + 1`.
    pub fn twist_delta(&self, m: i64) -> Rat {
        q(m) + Rat::new(self.alpha as i128, 2) + q(1)
    }

    /// The down-then-up loop at `δ = m+α/2+1` as a word of left mutations at `M_{δ−1∩δ}`.
    pub fn spherical_twist_word(&self, m: i64) -> Result<MutationWord> {
        let delta = [self.twist_delta(m)];
        let below = [delta[0] - q(1)];
        let down = mutation_word(&self.g1_rep, &self.arrangement, &delta, &below)?;
        let up = mutation_word(&self.g1_rep, &self.arrangement, &below, &delta)?;
        let steps: Vec<MutationStep> = down.steps.iter().chain(&up.steps).cloned().collect();
        if steps.iter().any(|s| s.direction != Direction::Left) {
            return Err(Error::Inconsistent("twist loop contains a right mutation".into()));
        }
        Ok(MutationWord {
            delta: delta.to_vec(),
            delta_prime: delta.to_vec(),
            pivot: down.pivot,
            total: steps.len(),
            steps,
            exchange_counts: down.exchange_counts.into_iter().chain(up.exchange_counts).collect(),
            executable: true,
        })
    }

    pub fn twist_path(&self, m: i64) -> Path {
        let delta = vec![self.twist_delta(m)];
        let below = vec![delta[0] - q(1)];
        Path::through(&[delta.clone(), below, delta])
    }

    pub fn twist_transcript(&self, m: i64) -> Result<Transcript> {
        mutation_transcript(&self.g1_rep, &self.arrangement, &self.twist_path(m))
    }

    pub fn report(&self, m: i64) -> Result<CYReport> {
        let window_size = self.window_size(0)?;
        let (d_plus, d_minus) = self.crossing_data(self.arrangement_offset)?;
        let word = self.spherical_twist_word(m)?;
        let transcript = self.twist_transcript(m)?;
        let delta = [self.twist_delta(m)];
        let below = [delta[0] - q(1)];
        let wall = ToricWall::new(&self.g1_rep, &self.arrangement, &delta, &below)?;
        let start = module_of_window(&self.g1_rep, &self.arrangement, &delta)?;
        let trace = mutate(&self.g1_rep, &start, &wall, Direction::Left, word.total)?;
        let first_return = trace.iter().skip(1).position(|x| *x == start).map(|k| k + 1);
        let shifted = window(&self.g1_rep, &self.arrangement, &[delta[0] + q(1)])?.chars;
        let here = window(&self.g1_rep, &self.arrangement, &delta)?.chars;
        let shift_ok = here.iter().map(|c| vec![c[0] + 1]).collect::<Vec<Weight>>() == shifted;
        Ok(CYReport {
            alpha: self.alpha,
            arrangement: self.arrangement_name(),
            window_size,
            d_plus,
            d_minus,
            twist_m: m,
            twist_delta: delta[0],
            twist_word_length: word.total,
            period: d_plus + d_minus - 2,
            loop_returns_at: first_return,
            transcript_coherent: transcript.coherent(),
            window_shift_ok: shift_ok,
            word,
            transcript,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CYReport {
    pub alpha: i64,
    pub arrangement: &'static str,
    pub window_size: usize,
    pub d_plus: usize,
    pub d_minus: usize,
    pub twist_m: i64,
    pub twist_delta: Rat,
    pub twist_word_length: usize,
    pub period: usize,
    pub loop_returns_at: Option<usize>,
    pub transcript_coherent: bool,
    pub window_shift_ok: bool,
    pub word: MutationWord,
    pub transcript: Transcript,
}

impl CYReport {
    pub fn ok(&self) -> bool {
        self.window_size as i64 == self.alpha + 1
            && self.twist_word_length == self.period
            && self.loop_returns_at == Some(self.period)
            && self.transcript_coherent
            && self.transcript.total_steps() == self.period
            && self.window_shift_ok
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha,
            "arrangement": self.arrangement,
            "window_size": self.window_size,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "twist_word_length": self.twist_word_length,
            "period": self.period,
            "twist": {
                "m": self.twist_m,
                "delta": crate::json::rat(&self.twist_delta),
                "convention": "down-then-up",
                "label": self.transcript.label(),
                "loop_returns_at": self.loop_returns_at,
                "coherent": self.transcript_coherent,
            },
            "window_shift_ok": self.window_shift_ok,
        })
    }
}
