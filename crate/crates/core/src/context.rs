//! Per-prime state with memoized norm lists, `W_theta` sets, groups,
//! representatives and characters.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::characters::{
    build_sp4_character, build_su2_character, CharacterPolynomial, SU2CharacterPolynomial,
};
use crate::config::{bundled_record, AlgebraRecord, SUPPORTED_PRIMES};
use crate::error::{Error, Result};
use crate::genus::{
    compute_w_theta, gamma1, gamma2_from_w1, mass_check, FiniteGroup, GenusData, MassReport,
};
use crate::hecke::{quat_hecke_reps, reps_from_y, HeckeRepSet};
use crate::lattice::{unit_group, NormCache};
use crate::order::{Coords, IntMatrix, MaximalOrder};

/// Persistent storage for expensive intermediate results. Loaded data is
/// re-verified before use, so a store may be lossy or stale.
pub trait Store: Send + Sync {
    fn load_w(&self, p: u64, theta: u64) -> Option<Vec<IntMatrix>>;
    fn save_w(&self, p: u64, theta: u64, w: &[IntMatrix]);
    fn load_character(&self, j: u32, k: u32) -> Option<CharacterPolynomial>;
    fn save_character(&self, chi: &CharacterPolynomial);
}

pub struct PrimeContext {
    p: u64,
    record: AlgebraRecord,
    order: Arc<MaximalOrder>,
    genus: Arc<GenusData>,
    norms: NormCache,
    units: Vec<Coords>,
    w_sets: Mutex<HashMap<u64, Arc<Vec<IntMatrix>>>>,
    gamma1: OnceLock<Arc<FiniteGroup>>,
    gamma2: OnceLock<Arc<FiniteGroup>>,
    reps: Mutex<HashMap<u64, Arc<HeckeRepSet>>>,
    store: Option<Arc<dyn Store>>,
}

impl std::fmt::Debug for PrimeContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeContext")
            .field("p", &self.p)
            .finish_non_exhaustive()
    }
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::from_record(bundled_record(p)?, None)
    }

    pub fn from_record(record: AlgebraRecord, store: Option<Arc<dyn Store>>) -> Result<Self> {
        if !SUPPORTED_PRIMES.contains(&record.p) {
            return Err(Error::UnsupportedPrime(record.p));
        }
        let order = Arc::new(MaximalOrder::new(&record.algebra, record.basis.clone())?);
        let (lambda, mu) =
            crate::genus::find_lambda_mu(&order, record.lambda.as_ref().zip(record.mu.as_ref()))?;
        let genus = Arc::new(GenusData::new(Arc::clone(&order), lambda, mu)?);
        Ok(PrimeContext {
            p: record.p,
            units: unit_group(&order),
            norms: NormCache::new(Arc::clone(&order)),
            record,
            order,
            genus,
            w_sets: Mutex::new(HashMap::new()),
            gamma1: OnceLock::new(),
            gamma2: OnceLock::new(),
            reps: Mutex::new(HashMap::new()),
            store,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn record(&self) -> &AlgebraRecord {
        &self.record
    }

    pub fn order(&self) -> &Arc<MaximalOrder> {
        &self.order
    }

    pub fn genus(&self) -> &Arc<GenusData> {
        &self.genus
    }

    pub fn norms(&self) -> &NormCache {
        &self.norms
    }

    pub fn units(&self) -> &[Coords] {
        &self.units
    }

    /// `W_theta`, from memory, the store, or by enumeration.
    pub fn w_theta(&self, theta: u64) -> Result<Arc<Vec<IntMatrix>>> {
        if let Some(w) = self.w_sets.lock().expect("lock").get(&theta) {
            return Ok(Arc::clone(w));
        }
        let stored = self
            .store
            .as_ref()
            .and_then(|s| s.load_w(self.p, theta))
            .filter(|w| {
                w.windows(2).all(|p| p[0] < p[1])
                    && w.iter().all(|nu| self.genus.preserves_form(nu, theta))
            });
        let w = match stored {
            Some(w) => w,
            None => {
                let w = compute_w_theta(&self.genus, &self.norms, theta)?;
                if let Some(s) = &self.store {
                    s.save_w(self.p, theta, &w);
                }
                w
            }
        };
        let w = Arc::new(w);
        self.w_sets
            .lock()
            .expect("lock")
            .insert(theta, Arc::clone(&w));
        Ok(w)
    }

    pub fn gamma2(&self) -> Result<Arc<FiniteGroup>> {
        if let Some(g) = self.gamma2.get() {
            return Ok(Arc::clone(g));
        }
        let w1 = self.w_theta(1)?;
        let g = Arc::new(gamma2_from_w1(&self.genus, w1.as_ref().clone())?);
        Ok(Arc::clone(self.gamma2.get_or_init(|| g)))
    }

    pub fn gamma1(&self) -> Result<Arc<FiniteGroup>> {
        if let Some(g) = self.gamma1.get() {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(gamma1(&self.order)?);
        Ok(Arc::clone(self.gamma1.get_or_init(|| g)))
    }

    pub fn mass_report(&self) -> Result<MassReport> {
        let g1 = if self.p <= 3 {
            Some(self.gamma1()?.len())
        } else {
            None
        };
        mass_check(self.p, g1, self.gamma2()?.len())
    }

    fn check_q(&self, q: u64) -> Result<()> {
        if q == self.p || q < 2 || !(2..q).all(|d| !q.is_multiple_of(d)) {
            return Err(Error::Unsupported(format!(
                "q = {q} must be a prime different from p = {}",
                self.p
            )));
        }
        Ok(())
    }

    /// Representatives for `T_q` on the non-principal genus.
    pub fn hecke_reps(&self, q: u64) -> Result<Arc<HeckeRepSet>> {
        self.check_q(q)?;
        if let Some(r) = self.reps.lock().expect("lock").get(&q) {
            return Ok(Arc::clone(r));
        }
        let gamma = self.gamma2()?;
        let reps = Arc::new(reps_from_y(&self.w_theta(q)?, &gamma, q)?);
        self.reps.lock().expect("lock").insert(q, Arc::clone(&reps));
        Ok(reps)
    }

    /// Representatives of `X_q / O^x` in integer coordinates.
    pub fn quat_reps(&self, q: u64) -> Result<Vec<Coords>> {
        self.check_q(q)?;
        quat_hecke_reps(&self.order, q)?
            .iter()
            .map(|x| {
                self.order
                    .coords_of(x)
                    .ok_or_else(|| Error::Consistency("representative outside the order".into()))
            })
            .collect()
    }
}

/// Shared contexts and characters, created on first use.
#[derive(Default)]
pub struct ContextPool {
    contexts: Mutex<HashMap<u64, Arc<PrimeContext>>>,
    characters: Mutex<HashMap<(u32, u32), Arc<CharacterPolynomial>>>,
    su2: Mutex<HashMap<u32, Arc<SU2CharacterPolynomial>>>,
    records: HashMap<u64, AlgebraRecord>,
    store: Option<Arc<dyn Store>>,
}

impl ContextPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(store: Arc<dyn Store>) -> Self {
        ContextPool {
            store: Some(store),
            ..Self::default()
        }
    }

    /// Uses `record` instead of the bundled table for its prime.
    pub fn override_record(&mut self, record: AlgebraRecord) {
        self.records.insert(record.p, record);
    }

    pub fn context(&self, p: u64) -> Result<Arc<PrimeContext>> {
        if let Some(c) = self.contexts.lock().expect("lock").get(&p) {
            return Ok(Arc::clone(c));
        }
        let record = match self.records.get(&p) {
            Some(r) => r.clone(),
            None => bundled_record(p)?,
        };
        let ctx = Arc::new(PrimeContext::from_record(record, self.store.clone())?);
        let mut map = self.contexts.lock().expect("lock");
        Ok(Arc::clone(map.entry(p).or_insert(ctx)))
    }

    pub fn character(&self, j: u32, k: u32) -> Result<Arc<CharacterPolynomial>> {
        if let Some(c) = self.characters.lock().expect("lock").get(&(j, k)) {
            return Ok(Arc::clone(c));
        }
        let stored = self
            .store
            .as_ref()
            .and_then(|s| s.load_character(j, k))
            .and_then(|c| c.rehydrate().ok())
            .filter(|c| {
                c.j == j && c.k == k && c.dimension() == crate::trace::weyl_dimension(j, k)
            });
        let chi = match stored {
            Some(c) => c,
            None => {
                let c = build_sp4_character(j, k)?;
                if let Some(s) = &self.store {
                    s.save_character(&c);
                }
                c
            }
        };
        let chi = Arc::new(chi);
        self.characters
            .lock()
            .expect("lock")
            .insert((j, k), Arc::clone(&chi));
        Ok(chi)
    }

    pub fn su2_character(&self, j: u32) -> Result<Arc<SU2CharacterPolynomial>> {
        if let Some(c) = self.su2.lock().expect("lock").get(&j) {
            return Ok(Arc::clone(c));
        }
        let chi = Arc::new(build_su2_character(j)?);
        self.su2.lock().expect("lock").insert(j, Arc::clone(&chi));
        Ok(chi)
    }
}
