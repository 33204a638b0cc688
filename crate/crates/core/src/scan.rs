//! Family scans: enumerate squarefree d with N_d(x, y) = l soluble over Q,
//! record 4-rank and integral solubility, persist as JSON lines and compare
//! the counts with the random-matrix predictions.
//!
//! Output layout (one JSON object per line, keys sorted):
//!
//! * one record per family member, ascending in d, with keys
//!   `schema_version`, `d`, `primes`, `l`, `in_family`, `rk4`, `soluble_z`,
//!   `witness`, `witness_omitted`, `q_soluble`, `rk4_forms`, `rk4_ord`,
//!   `rk8_narrow`, `rk8_ord`, `rk8_symbols`, `negative_pell`.
//!   Integers beyond 2^53 are written as decimal strings.
//! * a trailing line `{"chain", "summary", "summary_sha256"}`.
//!
//! The summary is also written next to the output as `<out>.summary.json`, and
//! progress as `<out>.ckpt`: the highest flushed d, the byte length of the
//! flushed records and the rolling SHA-256 over them.

use std::collections::{BTreeMap, VecDeque};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::{self, FamilyStatus, QuadField};
use crate::error::{Error, Result};
use crate::model;
use crate::quadform::{self, Representation};
use crate::redei::{self, RedeiProfile};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest scan bound accepted.
pub const MAX_N: u64 = 100_000_000;
/// Class-group cross-checks run on records with d up to this bound.
pub const CLASSGROUP_MAX_D: u64 = 20_000;
pub const DEFAULT_WITNESS_DIGITS: usize = 40;
/// Records recomputed from scratch when resuming.
pub const REVERIFY_TAIL: usize = 100;

const BLOCK: u64 = 1 << 15;
const MAX_SAFE: u64 = 1 << 53;

fn family_block(lo: u64, hi: u64, l: i64, primes: &[u64]) -> Result<Vec<(u64, Vec<u64>)>> {
    let lo = lo.max(2);
    if lo >= hi {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, f) in arith::factor_squarefree_range(lo, hi, primes).into_iter().enumerate() {
        if let Some(ps) = f {
            let d = lo + i as u64;
            if arith::in_family_with_primes(d, &ps, l)? == FamilyStatus::Yes {
                out.push((d, ps));
            }
        }
    }
    Ok(out)
}

fn check_bound(n: u64, l: i64) -> Result<()> {
    arith::check_l(l)?;
    if n > MAX_N {
        return Err(Error::OutOfRange(n as i64, "scan bound must be at most 10^8"));
    }
    Ok(())
}

/// Ascending family members d ≤ N for the target l.
pub struct FamilyIter {
    n: u64,
    l: i64,
    next_lo: u64,
    primes: Vec<u64>,
    buf: VecDeque<u64>,
}

pub fn enumerate_family(n: u64, l: i64) -> Result<FamilyIter> {
    check_bound(n, l)?;
    Ok(FamilyIter {
        n,
        l,
        next_lo: 2,
        primes: arith::primes_up_to(arith::isqrt(n) + 1),
        buf: VecDeque::new(),
    })
}

impl Iterator for FamilyIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.buf.is_empty() && self.next_lo <= self.n {
            let hi = (self.next_lo + BLOCK).min(self.n + 1);
            let block = family_block(self.next_lo, hi, self.l, &self.primes)
                .expect("l validated on construction");
            self.buf.extend(block.into_iter().map(|(d, _)| d));
            self.next_lo = hi;
        }
        self.buf.pop_front()
    }
}

/// Class-group invariants computed from forms, with the 8-rank from symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroupCheck {
    pub rk4_forms: u32,
    pub rk4_ord: u32,
    pub rk8_narrow: u32,
    pub rk8_ord: u32,
    /// Present when rk4 ≥ 1.
    pub rk8_symbols: Option<u32>,
    pub negative_pell: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRecord {
    pub d: u64,
    pub primes: Vec<u64>,
    pub l: i64,
    pub in_family: FamilyStatus,
    pub rk4: u32,
    /// Only set for family members.
    pub soluble_z: Option<bool>,
    pub witness: Option<(BigInt, BigInt)>,
    /// Soluble, but the witness exceeded the digit cap.
    pub witness_omitted: bool,
    /// Whether x² − d y² = l z² has a rational point (independent descent).
    pub q_soluble: Option<bool>,
    pub class_group: Option<ClassGroupCheck>,
}

fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) if x.unsigned_abs() <= MAX_SAFE => json!(x),
        _ => json!(v.to_string()),
    }
}

fn int_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn corrupt(what: &str) -> Error {
    Error::CorruptCheckpoint(format!("bad record field `{what}`"))
}

impl ScanRecord {
    pub fn to_json(&self) -> Value {
        let cg = self.class_group.as_ref();
        json!({
            "schema_version": SCHEMA_VERSION,
            "d": self.d,
            "primes": self.primes,
            "l": self.l,
            "in_family": self.in_family.as_str(),
            "rk4": self.rk4,
            "soluble_z": self.soluble_z,
            "witness": self.witness.as_ref().map(|(x, y)| vec![int_json(x), int_json(y)]),
            "witness_omitted": self.witness_omitted,
            "q_soluble": self.q_soluble,
            "rk4_forms": cg.map(|c| c.rk4_forms),
            "rk4_ord": cg.map(|c| c.rk4_ord),
            "rk8_narrow": cg.map(|c| c.rk8_narrow),
            "rk8_ord": cg.map(|c| c.rk8_ord),
            "rk8_symbols": cg.and_then(|c| c.rk8_symbols),
            "negative_pell": cg.map(|c| c.negative_pell),
        })
    }

    pub fn to_line(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| corrupt(k));
        let u = |k: &str| get(k)?.as_u64().ok_or_else(|| corrupt(k));
        let opt_u32 = |k: &str| -> Result<Option<u32>> {
            match get(k)? {
                Value::Null => Ok(None),
                x => x.as_u64().map(|x| Some(x as u32)).ok_or_else(|| corrupt(k)),
            }
        };
        let opt_bool = |k: &str| -> Result<Option<bool>> {
            match get(k)? {
                Value::Null => Ok(None),
                x => x.as_bool().map(Some).ok_or_else(|| corrupt(k)),
            }
        };
        if u("schema_version")? != SCHEMA_VERSION as u64 {
            return Err(corrupt("schema_version"));
        }
        let primes = get("primes")?
            .as_array()
            .ok_or_else(|| corrupt("primes"))?
            .iter()
            .map(|p| p.as_u64().ok_or_else(|| corrupt("primes")))
            .collect::<Result<Vec<_>>>()?;
        let in_family: FamilyStatus =
            serde_json::from_value(get("in_family")?.clone()).map_err(|_| corrupt("in_family"))?;
        let witness = match get("witness")? {
            Value::Null => None,
            Value::Array(a) if a.len() == 2 => Some((
                int_from_json(&a[0]).ok_or_else(|| corrupt("witness"))?,
                int_from_json(&a[1]).ok_or_else(|| corrupt("witness"))?,
            )),
            _ => return Err(corrupt("witness")),
        };
        let class_group = match opt_u32("rk4_forms")? {
            None => None,
            Some(rk4_forms) => Some(ClassGroupCheck {
                rk4_forms,
                rk4_ord: opt_u32("rk4_ord")?.ok_or_else(|| corrupt("rk4_ord"))?,
                rk8_narrow: opt_u32("rk8_narrow")?.ok_or_else(|| corrupt("rk8_narrow"))?,
                rk8_ord: opt_u32("rk8_ord")?.ok_or_else(|| corrupt("rk8_ord"))?,
                rk8_symbols: opt_u32("rk8_symbols")?,
                negative_pell: opt_bool("negative_pell")?.ok_or_else(|| corrupt("negative_pell"))?,
            }),
        };
        Ok(Self {
            d: u("d")?,
            primes,
            l: get("l")?.as_i64().ok_or_else(|| corrupt("l"))?,
            in_family,
            rk4: u("rk4")? as u32,
            soluble_z: opt_bool("soluble_z")?,
            witness,
            witness_omitted: get("witness_omitted")?
                .as_bool()
                .ok_or_else(|| corrupt("witness_omitted"))?,
            q_soluble: opt_bool("q_soluble")?,
            class_group,
        })
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(line)
            .map_err(|e| Error::CorruptCheckpoint(format!("unparsable record: {e}")))?;
        Self::from_json(&v)
    }

    /// Re-derive what the record claims from its own fields: factorization,
    /// membership, 4-rank, and the witness.
    pub fn verify(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Invariant(format!("record d = {}: {what}", self.d)));
        if self.primes.iter().product::<u64>() != self.d
            || self.primes.windows(2).any(|w| w[0] >= w[1])
            || !self.primes.iter().all(|&p| arith::is_prime(p))
        {
            return bad(format!("{:?} is not its factorization", self.primes));
        }
        let status = arith::in_family_with_primes(self.d, &self.primes, self.l)?;
        if status != self.in_family {
            return bad(format!("membership is {}", status.as_str()));
        }
        if self.soluble_z.is_some() != (self.in_family == FamilyStatus::Yes) {
            return bad("soluble_z must be present exactly for family members".into());
        }
        if self.in_family == FamilyStatus::Yes && self.l != -1 && !self.d.is_multiple_of(self.l.unsigned_abs()) {
            return bad("l does not divide d".into());
        }
        let field = QuadField::from_primes(self.d, self.primes.clone())?;
        let rk4 = RedeiProfile::from_field(field).rk4 as u32;
        if rk4 != self.rk4 {
            return bad(format!("stored rk4 {} but the Rédei matrix gives {rk4}", self.rk4));
        }
        if let Some((x, y)) = &self.witness {
            if self.soluble_z != Some(true) {
                return bad("witness on an insoluble record".into());
            }
            let n = quadform::principal_form(self.d)?;
            if n.eval(x, y) != BigInt::from(self.l) {
                return bad(format!("witness ({x}, {y}) does not represent {}", self.l));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    /// Cross-check against form class groups for d ≤ [`CLASSGROUP_MAX_D`].
    pub with_classgroup: bool,
    pub out: Option<PathBuf>,
    /// Defaults to `<out>.ckpt`.
    pub checkpoint_path: Option<PathBuf>,
    pub resume: bool,
    pub workers: usize,
    pub max_witness_digits: usize,
    /// Keep the records in memory in the returned output.
    pub keep_records: bool,
    /// Stop once every d up to this bound is flushed, leaving a checkpoint.
    pub stop_after: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            with_classgroup: false,
            out: None,
            checkpoint_path: None,
            resume: false,
            workers: 1,
            max_witness_digits: DEFAULT_WITNESS_DIGITS,
            keep_records: true,
            stop_after: None,
        }
    }
}

/// Compute the record of one family member.
pub fn compute_record(
    d: u64,
    primes: Vec<u64>,
    l: i64,
    with_classgroup: bool,
    max_witness_digits: usize,
) -> Result<ScanRecord> {
    let field = QuadField::from_primes(d, primes.clone())?;
    let profile = RedeiProfile::from_field(field);
    let status = arith::in_family_with_primes(d, &primes, l)?;
    let mut rec = ScanRecord {
        d,
        primes,
        l,
        in_family: status,
        rk4: profile.rk4 as u32,
        soluble_z: None,
        witness: None,
        witness_omitted: false,
        q_soluble: None,
        class_group: None,
    };
    if status != FamilyStatus::Yes {
        return Ok(rec);
    }
    let rep = quadform::represents_principal_capped(d, l, Some(max_witness_digits))?;
    if let Representation::Yes(w) = rep {
        rec.soluble_z = Some(true);
        rec.witness_omitted = w.is_none() && max_witness_digits > 0;
        rec.witness = w;
    } else {
        rec.soluble_z = Some(false);
    }
    rec.q_soluble = Some(match redei::solve_conic(d as i64, l) {
        Ok(_) => true,
        Err(Error::NoConicSolution { .. }) => false,
        Err(e) => return Err(e),
    });
    if with_classgroup && d <= CLASSGROUP_MAX_D {
        let delta = quadform::principal_form(d)?.disc() as i64;
        let cg = quadform::narrow_class_group(delta)?;
        if cg.rk4plus != rec.rk4 {
            return Err(Error::Invariant(format!(
                "d = {d}: rk4 {} from the Rédei matrix but {} from forms",
                rec.rk4, cg.rk4plus
            )));
        }
        let rk8_symbols = if rec.rk4 >= 1 {
            let r8 = redei::artin2_pairing_of(&profile, None)?.rk8 as u32;
            if r8 != cg.rk8plus {
                return Err(Error::Invariant(format!(
                    "d = {d}: rk8 {r8} from symbols but {} from forms",
                    cg.rk8plus
                )));
            }
            Some(r8)
        } else {
            None
        };
        rec.class_group = Some(ClassGroupCheck {
            rk4_forms: cg.rk4plus,
            rk4_ord: cg.rk4ord,
            rk8_narrow: cg.rk8plus,
            rk8_ord: cg.rk8ord,
            rk8_symbols,
            negative_pell: cg.negative_pell,
        });
    }
    Ok(rec)
}

/// Empirical versus predicted behaviour at one 4-rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rk4: u32,
    pub count: u64,
    pub soluble: u64,
    pub frequency: f64,
    pub predicted_frequency: f64,
    pub frequency_delta: f64,
    pub conditional: f64,
    pub predicted_conditional: f64,
    pub conditional_delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassGroupStats {
    pub records: u64,
    /// Records with narrow rk4 = ordinary rk4 = 1 and narrow rk8 = 1.
    pub rk8_drop_cases: u64,
    /// Of those, how many have ordinary rk8 = 0.
    pub rk8_drop_hits: u64,
    pub rk8_drop_fraction: Option<f64>,
    /// Records whose negative Pell flag from forms disagrees with soluble_z (l = −1).
    pub negative_pell_mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub l: i64,
    pub count_q: u64,
    pub count_z: u64,
    pub ratio: Option<f64>,
    /// Model value for the limiting ratio: γ for prime l, the bounds' midpoint for l = −1.
    pub predicted_ratio: f64,
    pub rk4_histogram: BTreeMap<u32, u64>,
    pub conditional: BTreeMap<u32, f64>,
    pub by_rk4: Vec<RankRow>,
    pub witnesses_omitted: u64,
    /// Members whose rational solubility failed the independent descent check.
    pub q_check_failures: Vec<u64>,
    /// Members with rk4 = 0 that are not integrally soluble (expected empty).
    pub rk4_zero_insoluble: Vec<u64>,
    pub class_group: Option<ClassGroupStats>,
    /// SHA-256 over the record lines in ascending d.
    pub records_sha256: String,
    pub heuristic: bool,
    pub note: String,
}

impl Summary {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("summary serializes")
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().to_string().as_bytes()))
    }
}

fn pell_midpoint() -> f64 {
    static MID: OnceLock<f64> = OnceLock::new();
    *MID.get_or_init(|| {
        let b = model::pell_bounds(40).expect("depth 40 is supported");
        (b.lower.value + b.upper.value) / 2.0
    })
}

/// Incremental counting behind [`aggregate`]; records must arrive in ascending d.
pub struct Aggregator {
    l: Option<i64>,
    count_q: u64,
    count_z: u64,
    hist: BTreeMap<u32, (u64, u64)>,
    omitted: u64,
    q_fail: Vec<u64>,
    rk4_zero_insoluble: Vec<u64>,
    cg: Option<ClassGroupStats>,
    hasher: Sha256,
    last_d: u64,
}

impl Default for Aggregator {
    fn default() -> Self {
        Self::new()
    }
}

impl Aggregator {
    pub fn new() -> Self {
        Self {
            l: None,
            count_q: 0,
            count_z: 0,
            hist: BTreeMap::new(),
            omitted: 0,
            q_fail: Vec::new(),
            rk4_zero_insoluble: Vec::new(),
            cg: None,
            hasher: Sha256::new(),
            last_d: 0,
        }
    }

    pub fn add(&mut self, r: &ScanRecord) -> Result<()> {
        match self.l {
            Some(l) if l != r.l => return Err(Error::MixedL(l, r.l)),
            _ => self.l = Some(r.l),
        }
        if r.d <= self.last_d {
            return Err(Error::Invariant(format!("record {} arrives after {}", r.d, self.last_d)));
        }
        self.last_d = r.d;
        self.hasher.update(r.to_line().as_bytes());
        self.hasher.update(b"\n");
        if r.in_family != FamilyStatus::Yes {
            return Ok(());
        }
        self.count_q += 1;
        let sol = r.soluble_z == Some(true);
        let e = self.hist.entry(r.rk4).or_default();
        e.0 += 1;
        if sol {
            self.count_z += 1;
            e.1 += 1;
        }
        if r.witness_omitted {
            self.omitted += 1;
        }
        if r.q_soluble == Some(false) {
            self.q_fail.push(r.d);
        }
        if r.rk4 == 0 && !sol {
            self.rk4_zero_insoluble.push(r.d);
        }
        if let Some(c) = &r.class_group {
            let s = self.cg.get_or_insert_with(ClassGroupStats::default);
            s.records += 1;
            if c.rk4_forms == 1 && c.rk4_ord == 1 && c.rk8_narrow == 1 {
                s.rk8_drop_cases += 1;
                if c.rk8_ord == 0 {
                    s.rk8_drop_hits += 1;
                }
            }
            if r.l == -1 && c.negative_pell != sol {
                s.negative_pell_mismatches += 1;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Summary {
        let l = self.l.unwrap_or(0);
        let q = self.count_q;
        let frac = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let by_rk4: Vec<RankRow> = self
            .hist
            .iter()
            .map(|(&j, &(c, s))| {
                let pf = model::fourrank_prob(j as usize);
                let pc = model::conditional_solubility(j as usize).to_f64().unwrap_or(0.0);
                RankRow {
                    rk4: j,
                    count: c,
                    soluble: s,
                    frequency: frac(c, q),
                    predicted_frequency: pf,
                    frequency_delta: frac(c, q) - pf,
                    conditional: frac(s, c),
                    predicted_conditional: pc,
                    conditional_delta: frac(s, c) - pc,
                }
            })
            .collect();
        let predicted_ratio = if l == -1 {
            pell_midpoint()
        } else {
            model::GAMMA_REGRESSION
        };
        let cg = self.cg.map(|mut s| {
            s.rk8_drop_fraction =
                (s.rk8_drop_cases > 0).then(|| s.rk8_drop_hits as f64 / s.rk8_drop_cases as f64);
            s
        });
        Summary {
            schema_version: SCHEMA_VERSION,
            l,
            count_q: q,
            count_z: self.count_z,
            ratio: (q > 0).then(|| self.count_z as f64 / q as f64),
            predicted_ratio,
            rk4_histogram: self.hist.iter().map(|(&j, &(c, _))| (j, c)).collect(),
            conditional: self.hist.iter().map(|(&j, &(c, s))| (j, frac(s, c))).collect(),
            by_rk4,
            witnesses_omitted: self.omitted,
            q_check_failures: self.q_fail,
            rk4_zero_insoluble: self.rk4_zero_insoluble,
            class_group: cg,
            records_sha256: hex::encode(self.hasher.finalize()),
            heuristic: true,
            note: "desk-scale frequencies; model values are limits and tolerances are heuristic"
                .into(),
        }
    }
}

/// Summary of records from one scan; input order does not matter.
pub fn aggregate(records: &[ScanRecord]) -> Result<Summary> {
    let mut sorted: Vec<&ScanRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.d);
    let mut agg = Aggregator::new();
    for r in sorted {
        agg.add(r)?;
    }
    Ok(agg.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    n: u64,
    l: i64,
    with_classgroup: bool,
    max_witness_digits: usize,
    last_d: u64,
    records: u64,
    bytes: u64,
    chain: String,
}

pub struct ScanOutput {
    pub summary: Summary,
    pub summary_sha256: String,
    /// Rolling hash over all record lines.
    pub chain: String,
    /// Empty unless `keep_records`.
    pub records: Vec<ScanRecord>,
    /// False when stopped early by `stop_after`.
    pub complete: bool,
}

fn genesis(n: u64, l: i64, opts: &ScanOptions) -> String {
    let seed = format!(
        "pellrank-scan/{SCHEMA_VERSION}/{n}/{l}/{}/{}",
        opts.with_classgroup, opts.max_witness_digits
    );
    hex::encode(Sha256::digest(seed.as_bytes()))
}

fn chain_step(prev: &str, line: &str) -> String {
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(line.as_bytes());
    hex::encode(h.finalize())
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = with_suffix(path, ".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct State {
    agg: Aggregator,
    chain: String,
    last_d: u64,
    records: u64,
    bytes: u64,
    kept: Vec<ScanRecord>,
}

/// Load flushed records named by a checkpoint and check them.
fn restore(
    n: u64,
    l: i64,
    opts: &ScanOptions,
    out: &Path,
    ckpt: &Checkpoint,
) -> Result<State> {
    let expect = Checkpoint {
        n,
        l,
        with_classgroup: opts.with_classgroup,
        max_witness_digits: opts.max_witness_digits,
        ..ckpt.clone()
    };
    if *ckpt != expect || ckpt.schema_version != SCHEMA_VERSION {
        return Err(Error::CorruptCheckpoint("checkpoint belongs to a different scan".into()));
    }
    let mut buf = Vec::new();
    File::open(out)?.read_to_end(&mut buf)?;
    if (buf.len() as u64) < ckpt.bytes {
        return Err(Error::CorruptCheckpoint("output is shorter than the checkpoint".into()));
    }
    buf.truncate(ckpt.bytes as usize);
    let text = String::from_utf8(buf)
        .map_err(|_| Error::CorruptCheckpoint("output is not UTF-8".into()))?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() as u64 != ckpt.records {
        return Err(Error::CorruptCheckpoint("record count differs".into()));
    }
    let mut chain = genesis(n, l, opts);
    let mut agg = Aggregator::new();
    let mut kept = Vec::new();
    let tail_start = lines.len().saturating_sub(REVERIFY_TAIL);
    for (i, line) in lines.iter().enumerate() {
        chain = chain_step(&chain, line);
        let rec = ScanRecord::from_line(line)?;
        if rec.l != l || rec.d > ckpt.last_d {
            return Err(Error::CorruptCheckpoint(format!("record {} is out of place", rec.d)));
        }
        if i >= tail_start {
            rec.verify().map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
            let fresh = compute_record(
                rec.d,
                rec.primes.clone(),
                l,
                opts.with_classgroup,
                opts.max_witness_digits,
            )?;
            if fresh.to_line() != *line {
                return Err(Error::CorruptCheckpoint(format!("record {} does not recompute", rec.d)));
            }
        }
        agg.add(&rec)
            .map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
        if opts.keep_records {
            kept.push(rec);
        }
    }
    if chain != ckpt.chain {
        return Err(Error::CorruptCheckpoint("record hash chain does not match".into()));
    }
    Ok(State {
        agg,
        chain,
        last_d: ckpt.last_d,
        records: ckpt.records,
        bytes: ckpt.bytes,
        kept,
    })
}

/// Scan every d ≤ N of the family of l.
pub fn scan(n: u64, l: i64, opts: &ScanOptions) -> Result<ScanOutput> {
    check_bound(n, l)?;
    let workers = opts.workers.max(1);
    let ckpt_path = opts
        .checkpoint_path
        .clone()
        .or_else(|| opts.out.as_ref().map(|o| with_suffix(o, ".ckpt")));

    let mut state = None;
    if opts.resume {
        if let (Some(out), Some(cp)) = (&opts.out, &ckpt_path) {
            if cp.exists() {
                let ckpt: Checkpoint = serde_json::from_slice(&fs::read(cp)?)
                    .map_err(|e| Error::CorruptCheckpoint(format!("unreadable checkpoint: {e}")))?;
                state = Some(restore(n, l, opts, out, &ckpt)?);
            }
        }
    }
    let mut st = state.unwrap_or_else(|| State {
        agg: Aggregator::new(),
        chain: genesis(n, l, opts),
        last_d: 1,
        records: 0,
        bytes: 0,
        kept: Vec::new(),
    });

    let mut writer = match &opts.out {
        Some(out) => {
            let f = OpenOptions::new().create(true).write(true).truncate(false).open(out)?;
            f.set_len(st.bytes)?;
            let mut w = BufWriter::new(f);
            use std::io::Seek;
            w.seek(std::io::SeekFrom::Start(st.bytes))?;
            Some(w)
        }
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let primes = arith::primes_up_to(arith::isqrt(n) + 1);
    let batch = (workers * 4) as u64;

    let mut lo = st.last_d + 1;
    while lo <= n {
        let ranges: Vec<(u64, u64)> = (0..batch)
            .map(|i| lo + i * BLOCK)
            .take_while(|&a| a <= n)
            .map(|a| (a, (a + BLOCK).min(n + 1)))
            .collect();
        let hi = ranges.last().map_or(lo, |r| r.1);
        let blocks: Vec<Vec<ScanRecord>> = pool.install(|| {
            ranges
                .par_iter()
                .map(|&(a, b)| {
                    family_block(a, b, l, &primes)?
                        .into_iter()
                        .map(|(d, ps)| {
                            compute_record(d, ps, l, opts.with_classgroup, opts.max_witness_digits)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for rec in blocks.into_iter().flatten() {
            let line = rec.to_line();
            st.agg.add(&rec)?;
            st.chain = chain_step(&st.chain, &line);
            st.records += 1;
            st.bytes += line.len() as u64 + 1;
            if let Some(w) = writer.as_mut() {
                w.write_all(line.as_bytes())?;
                w.write_all(b"\n")?;
            }
            if opts.keep_records {
                st.kept.push(rec);
            }
        }
        st.last_d = hi - 1;
        if let (Some(w), Some(cp)) = (writer.as_mut(), &ckpt_path) {
            w.flush()?;
            w.get_ref().sync_data()?;
            let ckpt = Checkpoint {
                schema_version: SCHEMA_VERSION,
                n,
                l,
                with_classgroup: opts.with_classgroup,
                max_witness_digits: opts.max_witness_digits,
                last_d: st.last_d,
                records: st.records,
                bytes: st.bytes,
                chain: st.chain.clone(),
            };
            write_atomic(cp, &serde_json::to_vec(&ckpt).expect("checkpoint serializes"))?;
        }
        lo = hi;
        if opts.stop_after.is_some_and(|s| st.last_d >= s) && lo <= n {
            let summary = st.agg.finish();
            return Ok(ScanOutput {
                summary_sha256: summary.sha256(),
                summary,
                chain: st.chain,
                records: st.kept,
                complete: false,
            });
        }
    }

    let summary = st.agg.finish();
    let summary_sha256 = summary.sha256();
    if let (Some(mut w), Some(out)) = (writer, &opts.out) {
        let trailer = json!({
            "chain": st.chain,
            "summary": summary.to_json(),
            "summary_sha256": summary_sha256,
        });
        w.write_all(trailer.to_string().as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        let mut pretty = serde_json::to_vec_pretty(&trailer).expect("summary serializes");
        pretty.push(b'\n');
        write_atomic(&with_suffix(out, ".summary.json"), &pretty)?;
        if let Some(cp) = &ckpt_path {
            if cp.exists() {
                fs::remove_file(cp)?;
            }
        }
    }
    Ok(ScanOutput {
        summary,
        summary_sha256,
        chain: st.chain,
        records: st.kept,
        complete: true,
    })
}

/// Read the records of a scan output file, ignoring the trailing summary line.
pub fn read_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|line| !line.starts_with("{\"chain\""))
        .map(ScanRecord::from_line)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_examples() {
        let f: Vec<u64> = enumerate_family(100, 3).unwrap().collect();
        assert!(f.contains(&33));
        assert!(!f.contains(&15) && !f.contains(&3));
        assert!(f.windows(2).all(|w| w[0] < w[1]));
        let f: Vec<u64> = enumerate_family(10, -1).unwrap().collect();
        assert_eq!(f, vec![2, 5, 10]);
        assert_eq!(enumerate_family(2, 3).unwrap().count(), 0);
        assert!(enumerate_family(100, 5).is_err());
        assert!(enumerate_family(MAX_N + 1, 3).is_err());
    }

    #[test]
    fn family_matches_pointwise_test() {
        for l in [3, -3, 7, -7, -1] {
            let f: Vec<u64> = enumerate_family(3000, l).unwrap().collect();
            let brute: Vec<u64> = (2..=3000)
                .filter(|&d| arith::in_family(d, l).unwrap() == FamilyStatus::Yes)
                .collect();
            assert_eq!(f, brute, "l = {l}");
        }
    }

    fn rec(d: u64, rk4: u32, sol: bool) -> ScanRecord {
        ScanRecord {
            d,
            primes: vec![],
            l: 3,
            in_family: FamilyStatus::Yes,
            rk4,
            soluble_z: Some(sol),
            witness: None,
            witness_omitted: false,
            q_soluble: Some(true),
            class_group: None,
        }
    }

    #[test]
    fn aggregate_example() {
        let s = aggregate(&[rec(3, 0, true), rec(1, 0, true), rec(2, 1, false)]).unwrap();
        assert_eq!(s.rk4_histogram, BTreeMap::from([(0, 2), (1, 1)]));
        assert_eq!(s.conditional, BTreeMap::from([(0, 1.0), (1, 0.0)]));
        assert_eq!((s.count_q, s.count_z), (3, 2));
        let mut other = rec(4, 0, true);
        other.l = -1;
        assert!(matches!(
            aggregate(&[rec(1, 0, true), other]),
            Err(Error::MixedL(3, -1))
        ));
    }

    #[test]
    fn records_round_trip() {
        let r = compute_record(33, vec![3, 11], 3, true, 40).unwrap();
        assert_eq!(r.witness, Some((BigInt::from(5), BigInt::from(2))));
        r.verify().unwrap();
        assert_eq!(ScanRecord::from_line(&r.to_line()).unwrap(), r);
        let mut big = r.clone();
        big.witness = Some((BigInt::from(1u64 << 60), BigInt::from(-7)));
        let line = big.to_line();
        assert!(line.contains("\"1152921504606846976\""));
        assert_eq!(ScanRecord::from_line(&line).unwrap(), big);
        assert!(big.verify().is_err());
    }

    #[test]
    fn rk4_zero_members_are_soluble() {
        let out = scan(5000, 3, &ScanOptions::default()).unwrap();
        assert!(out.summary.count_q > 0);
        for r in &out.records {
            r.verify().unwrap();
            if r.rk4 == 0 {
                assert_eq!(r.soluble_z, Some(true), "d = {}", r.d);
            }
        }
        assert!(out.summary.q_check_failures.is_empty());
        assert_eq!(out.summary.rk4_histogram.values().sum::<u64>(), out.summary.count_q);
    }
}
