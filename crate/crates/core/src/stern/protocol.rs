//! The three-move argument: commitments, per-challenge responses and
//! verification, the three-transcript extractor, and the no-witness
//! simulator.

use crate::encode::zq_vector_bytes;
use crate::error::{Error, Result};
use crate::hash::com_commit;
use crate::stern::statement::{
    apply_map, sample_valid, statement_apply, valid_check, PermutationElement, SternStatement,
    SternWitness,
};
use crate::zq::{Solver, ZqVector};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    pub c1: [u8; 32],
    pub c2: [u8; 32],
    pub c3: [u8; 32],
}

/// Prover state carried between commitment and response.
pub struct ProverState {
    w: Vec<i8>,
    r_w: ZqVector,
    phi: PermutationElement,
    rho: [[u8; 32]; 3],
}

/// Challenge-dependent response payloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    /// Permuted witness and mask, with the openings of C2 and C3.
    Ch1 {
        t_w: ZqVector,
        t_r: ZqVector,
        rho2: [u8; 32],
        rho3: [u8; 32],
    },
    /// Permutation and masked witness, with the openings of C1 and C3.
    Ch2 {
        phi: PermutationElement,
        w2: ZqVector,
        rho1: [u8; 32],
        rho3: [u8; 32],
    },
    /// Permutation and mask, with the openings of C1 and C2.
    Ch3 {
        phi: PermutationElement,
        w3: ZqVector,
        rho1: [u8; 32],
        rho2: [u8; 32],
    },
}

impl Response {
    pub fn challenge(&self) -> u8 {
        match self {
            Response::Ch1 { .. } => 1,
            Response::Ch2 { .. } => 2,
            Response::Ch3 { .. } => 3,
        }
    }
}

fn ternary_to_zq(stmt: &SternStatement, w: &[i8]) -> ZqVector {
    let q = stmt.m_mat.q;
    ZqVector::from_u64(q, w.iter().map(|&x| q.reduce_i64(x as i64)).collect())
}

fn zq_to_ternary(v: &ZqVector) -> Option<Vec<i8>> {
    let q = v.q;
    v.data
        .iter()
        .map(|&x| {
            let c = q.center(x);
            if (-1..=1).contains(&c) {
                Some(c as i8)
            } else {
                None
            }
        })
        .collect()
}

fn com_c1(phi: &PermutationElement, m_r: &ZqVector, rho: &[u8; 32]) -> [u8; 32] {
    let mut payload = phi.to_bytes();
    payload.extend(zq_vector_bytes(m_r));
    com_commit(&payload, rho)
}

fn com_vec(v: &ZqVector, rho: &[u8; 32]) -> [u8; 32] {
    com_commit(&zq_vector_bytes(v), rho)
}

fn random_rho<R: Rng + ?Sized>(rng: &mut R) -> [u8; 32] {
    let mut r = [0u8; 32];
    rng.fill(&mut r);
    r
}

fn uniform_mask<R: Rng + ?Sized>(stmt: &SternStatement, rng: &mut R) -> ZqVector {
    let q = stmt.m_mat.q;
    ZqVector::from_u64(
        q,
        (0..stmt.dims.l())
            .map(|_| rng.gen_range(0..q.get()))
            .collect(),
    )
}

/// Commitment move. Requires an honest witness (checked).
pub fn round_commit<R: Rng + ?Sized>(
    stmt: &SternStatement,
    wit: &SternWitness,
    rng: &mut R,
) -> Result<(Commitment, ProverState)> {
    if !valid_check(&stmt.dims, &wit.w)? {
        return Err(Error::OutOfRange(
            "witness not in the structured set".into(),
        ));
    }
    if statement_apply(stmt, &wit.w)? != stmt.u0 {
        return Err(Error::OutOfRange(
            "witness does not satisfy the statement".into(),
        ));
    }
    let r_w = uniform_mask(stmt, rng);
    let phi = PermutationElement::sample(&stmt.dims, rng);
    let rho = [random_rho(rng), random_rho(rng), random_rho(rng)];
    let map = phi.index_map(&stmt.dims);

    let m_r = stmt.m_mat.mul_zq_vector(&r_w)?;
    let c1 = com_c1(&phi, &m_r, &rho[0]);
    let gamma_r = ZqVector::from_u64(r_w.q, apply_map(&map, &r_w.data));
    let c2 = com_vec(&gamma_r, &rho[1]);
    let w_zq = ternary_to_zq(stmt, &wit.w);
    let w_plus_r = w_zq.add(&r_w)?;
    let gamma_wr = ZqVector::from_u64(r_w.q, apply_map(&map, &w_plus_r.data));
    let c3 = com_vec(&gamma_wr, &rho[2]);

    Ok((
        Commitment { c1, c2, c3 },
        ProverState {
            w: wit.w.clone(),
            r_w,
            phi,
            rho,
        },
    ))
}

/// Response move.
pub fn round_respond(stmt: &SternStatement, state: &ProverState, ch: u8) -> Result<Response> {
    let map = state.phi.index_map(&stmt.dims);
    match ch {
        1 => {
            let w_zq = ternary_to_zq(stmt, &state.w);
            let t_w = ZqVector::from_u64(w_zq.q, apply_map(&map, &w_zq.data));
            let t_r = ZqVector::from_u64(w_zq.q, apply_map(&map, &state.r_w.data));
            Ok(Response::Ch1 {
                t_w,
                t_r,
                rho2: state.rho[1],
                rho3: state.rho[2],
            })
        }
        2 => {
            let w_zq = ternary_to_zq(stmt, &state.w);
            let w2 = w_zq.add(&state.r_w)?;
            Ok(Response::Ch2 {
                phi: state.phi.clone(),
                w2,
                rho1: state.rho[0],
                rho3: state.rho[2],
            })
        }
        3 => Ok(Response::Ch3 {
            phi: state.phi.clone(),
            w3: state.r_w.clone(),
            rho1: state.rho[0],
            rho2: state.rho[1],
        }),
        _ => Err(Error::OutOfRange(format!("challenge {ch} outside 1..=3"))),
    }
}

/// Verification move: the three branch checks.
pub fn round_verify(stmt: &SternStatement, cmt: &Commitment, ch: u8, rsp: &Response) -> bool {
    if rsp.challenge() != ch {
        return false;
    }
    let l = stmt.dims.l();
    match rsp {
        Response::Ch1 {
            t_w,
            t_r,
            rho2,
            rho3,
        } => {
            if t_w.len() != l || t_r.len() != l {
                return false;
            }
            let Some(tern) = zq_to_ternary(t_w) else {
                return false;
            };
            match valid_check(&stmt.dims, &tern) {
                Ok(true) => {}
                _ => return false,
            }
            if com_vec(t_r, rho2) != cmt.c2 {
                return false;
            }
            let Ok(sum) = t_w.add(t_r) else {
                return false;
            };
            com_vec(&sum, rho3) == cmt.c3
        }
        Response::Ch2 {
            phi,
            w2,
            rho1,
            rho3,
        } => {
            if w2.len() != l || !phi.validate(&stmt.dims) {
                return false;
            }
            let Ok(mw) = stmt.m_mat.mul_zq_vector(w2) else {
                return false;
            };
            let Ok(diff) = mw.sub(&stmt.u0) else {
                return false;
            };
            if com_c1(phi, &diff, rho1) != cmt.c1 {
                return false;
            }
            let map = phi.index_map(&stmt.dims);
            let gamma_w2 = ZqVector::from_u64(w2.q, apply_map(&map, &w2.data));
            com_vec(&gamma_w2, rho3) == cmt.c3
        }
        Response::Ch3 {
            phi,
            w3,
            rho1,
            rho2,
        } => {
            if w3.len() != l || !phi.validate(&stmt.dims) {
                return false;
            }
            let Ok(mw) = stmt.m_mat.mul_zq_vector(w3) else {
                return false;
            };
            if com_c1(phi, &mw, rho1) != cmt.c1 {
                return false;
            }
            let map = phi.index_map(&stmt.dims);
            let gamma_w3 = ZqVector::from_u64(w3.q, apply_map(&map, &w3.data));
            com_vec(&gamma_w3, rho2) == cmt.c2
        }
    }
}

/// Extract a witness from accepting responses to all three challenges on one
/// commitment. Inconsistent openings are reported as a binding violation
/// (they would exhibit a commitment collision).
pub fn extract_witness(
    stmt: &SternStatement,
    cmt: &Commitment,
    r1: &Response,
    r2: &Response,
    r3: &Response,
) -> Result<SternWitness> {
    let (
        Response::Ch1 { t_w, .. },
        Response::Ch2 { phi: phi2, w2, .. },
        Response::Ch3 { phi: phi3, w3, .. },
    ) = (r1, r2, r3)
    else {
        return Err(Error::OutOfRange(
            "responses must cover challenges 1, 2, 3".into(),
        ));
    };
    for (ch, rsp) in [(1u8, r1), (2, r2), (3, r3)] {
        if !round_verify(stmt, cmt, ch, rsp) {
            return Err(Error::OutOfRange(format!(
                "response for challenge {ch} does not verify"
            )));
        }
    }
    // Both accepted C1 openings must agree on the permutation.
    if phi2 != phi3 {
        return Err(Error::BindingViolation);
    }
    let w_zq = w2.sub(w3)?;
    let Some(w_tern) = zq_to_ternary(&w_zq) else {
        return Err(Error::BindingViolation);
    };
    // Cross-check against the challenge-1 opening: the permuted difference
    // must equal the revealed permuted witness.
    let map = phi2.index_map(&stmt.dims);
    let gamma_diff = apply_map(&map, &w_zq.data);
    if gamma_diff != t_w.data {
        return Err(Error::BindingViolation);
    }
    if !valid_check(&stmt.dims, &w_tern)? {
        return Err(Error::BindingViolation);
    }
    if statement_apply(stmt, &w_tern)? != stmt.u0 {
        return Err(Error::BindingViolation);
    }
    Ok(SternWitness { w: w_tern })
}

/// Simulator with a precomputed solver for the statement (the solver is the
/// expensive part; the per-transcript work is linear).
pub struct Simulator<'a> {
    stmt: &'a SternStatement,
    solver: Solver,
}

impl<'a> Simulator<'a> {
    pub fn new(stmt: &'a SternStatement) -> Self {
        Self {
            stmt,
            solver: Solver::new(&stmt.m_mat),
        }
    }

    /// One simulated transcript: guess the challenge to avoid, commit so the
    /// other two verify, abort when the drawn challenge hits the guess.
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<Option<(Commitment, u8, Response)>> {
        let stmt = self.stmt;
        let q = stmt.m_mat.q;
        let avoided = rng.gen_range(1u8..=3);
        let r_w = uniform_mask(stmt, rng);
        let phi = PermutationElement::sample(&stmt.dims, rng);
        let rho = [random_rho(rng), random_rho(rng), random_rho(rng)];
        let map = phi.index_map(&stmt.dims);

        // Fake witness: solves the statement when challenge 1 is avoided,
        // structurally valid otherwise.
        let w_fake: ZqVector = if avoided == 1 {
            self.solver.solve_random(&stmt.u0, rng)?
        } else {
            ternary_to_zq(stmt, &sample_valid(&stmt.dims, rng))
        };
        let w_plus_r = w_fake.add(&r_w)?;

        let c1 = if avoided == 3 {
            // Must satisfy the challenge-2 equation: open to M w2 - u0.
            let mw = stmt.m_mat.mul_zq_vector(&w_plus_r)?;
            com_c1(&phi, &mw.sub(&stmt.u0)?, &rho[0])
        } else {
            com_c1(&phi, &stmt.m_mat.mul_zq_vector(&r_w)?, &rho[0])
        };
        let gamma_r = ZqVector::from_u64(q, apply_map(&map, &r_w.data));
        let c2 = com_vec(&gamma_r, &rho[1]);
        let gamma_wr = ZqVector::from_u64(q, apply_map(&map, &w_plus_r.data));
        let c3 = com_vec(&gamma_wr, &rho[2]);
        let cmt = Commitment { c1, c2, c3 };

        let ch = rng.gen_range(1u8..=3);
        if ch == avoided {
            return Ok(None);
        }
        let rsp = match ch {
            1 => Response::Ch1 {
                t_w: ZqVector::from_u64(q, apply_map(&map, &w_fake.data)),
                t_r: gamma_r,
                rho2: rho[1],
                rho3: rho[2],
            },
            2 => Response::Ch2 {
                phi,
                w2: w_plus_r,
                rho1: rho[0],
                rho3: rho[2],
            },
            _ => Response::Ch3 {
                phi,
                w3: r_w,
                rho1: rho[0],
                rho2: rho[1],
            },
        };
        Ok(Some((cmt, ch, rsp)))
    }
}
