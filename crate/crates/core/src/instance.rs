//! Problem data model, the five-class benchmark generator, and instance
//! file I/O.
//!
//! All parameter values are integers. The generator is a deterministic
//! function of `(class, n_plants, seed)`: it derives one ChaCha8 substream
//! per parameter array (see [`generate_instance`]), so adding or reordering
//! a parameter in a future version can never perturb the draws of another.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{ChaChaSampler, Sampler};
use crate::{Money, Units};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fs;
use std::path::Path;

/// Bumped whenever a change would alter generated instances, so files record
/// which generator produced them.
pub const GENERATOR_VERSION: &str = "1";

/// Substream ids, one per parameter array.
const STREAM_DEMAND: u64 = 0;
const STREAM_PLANT_CAP: u64 = 1;
const STREAM_PLANT_COST: u64 = 2;
const STREAM_DEPOT_COST: u64 = 3;
const STREAM_DEPOT_CAP: u64 = 4;
const STREAM_SUPPLY_COST: u64 = 5;
const STREAM_DELIVERY_COST: u64 = 6;

/// Benchmark class tag (1..=5) or a hand-built instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassId {
    Benchmark(u8),
    Custom,
}

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassId::Benchmark(k) => write!(f, "{k}"),
            ClassId::Custom => write!(f, "custom"),
        }
    }
}

impl Serialize for ClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ClassId::Benchmark(k) => serializer.serialize_u8(*k),
            ClassId::Custom => serializer.serialize_str("custom"),
        }
    }
}

impl<'de> Deserialize<'de> for ClassId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ClassVisitor;
        impl Visitor<'_> for ClassVisitor {
            type Value = ClassId;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer 1..=5 or the string \"custom\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ClassId, E> {
                if (1..=5).contains(&v) {
                    Ok(ClassId::Benchmark(v as u8))
                } else {
                    Err(E::custom(format!("class {v} outside 1..=5")))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ClassId, E> {
                if v >= 0 {
                    self.visit_u64(v as u64)
                } else {
                    Err(E::custom(format!("class {v} outside 1..=5")))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ClassId, E> {
                if v == "custom" {
                    Ok(ClassId::Custom)
                } else {
                    Err(E::custom(format!("unknown class tag {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(ClassVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMeta {
    pub class_id: ClassId,
    pub seed: u64,
    pub generator_version: String,
}

/// One TSCFLP instance: plant/depot fixed costs and capacities, the two
/// unit transport cost matrices, and customer demands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n_plants: usize,
    pub n_depots: usize,
    pub n_customers: usize,
    /// Fixed opening cost per plant.
    pub plant_fixed_cost: Vec<Money>,
    /// Production capacity per plant.
    pub plant_capacity: Vec<Units>,
    /// Fixed opening cost per depot.
    pub depot_fixed_cost: Vec<Money>,
    /// Throughput capacity per depot.
    pub depot_capacity: Vec<Units>,
    /// Unit cost plant -> depot, `n_plants x n_depots`.
    pub supply_cost: Matrix<Money>,
    /// Unit cost depot -> customer, `n_depots x n_customers`.
    pub delivery_cost: Matrix<Money>,
    /// Demand per customer.
    pub demand: Vec<Units>,
    pub meta: InstanceMeta,
}

impl Instance {
    pub fn total_demand(&self) -> Units {
        self.demand.iter().sum()
    }

    pub fn total_plant_capacity(&self) -> Units {
        self.plant_capacity.iter().sum()
    }

    pub fn total_depot_capacity(&self) -> Units {
        self.depot_capacity.iter().sum()
    }

    /// Chromosome length for this instance.
    pub fn mask_len(&self) -> usize {
        self.n_plants + self.n_depots
    }

    /// Structural and feasibility checks; the generator guarantees these,
    /// the loader enforces them.
    pub fn validate(&self) -> Result<()> {
        if self.n_plants < 1 || self.n_depots < 1 || self.n_customers < 1 {
            return Err(Error::Validation("all counts must be >= 1".into()));
        }
        let dims_ok = self.plant_fixed_cost.len() == self.n_plants
            && self.plant_capacity.len() == self.n_plants
            && self.depot_fixed_cost.len() == self.n_depots
            && self.depot_capacity.len() == self.n_depots
            && self.demand.len() == self.n_customers
            && self.supply_cost.rows() == self.n_plants
            && self.supply_cost.cols() == self.n_depots
            && self.delivery_cost.rows() == self.n_depots
            && self.delivery_cost.cols() == self.n_customers;
        if !dims_ok {
            return Err(Error::Validation(
                "parameter array dimensions disagree with counts".into(),
            ));
        }
        let positive = self.plant_fixed_cost.iter().all(|&v| v > 0)
            && self.plant_capacity.iter().all(|&v| v > 0)
            && self.depot_fixed_cost.iter().all(|&v| v > 0)
            && self.depot_capacity.iter().all(|&v| v > 0)
            && self.demand.iter().all(|&v| v > 0)
            && self.supply_cost.iter().all(|&v| v > 0)
            && self.delivery_cost.iter().all(|&v| v > 0);
        if !positive {
            return Err(Error::Validation(
                "all costs, capacities and demands must be strictly positive".into(),
            ));
        }
        let need = self.total_demand();
        if self.total_plant_capacity() < need {
            return Err(Error::Validation(format!(
                "infeasible instance: total plant capacity {} < total demand {need}",
                self.total_plant_capacity()
            )));
        }
        if self.total_depot_capacity() < need {
            return Err(Error::Validation(format!(
                "infeasible instance: total depot capacity {} < total demand {need}",
                self.total_depot_capacity()
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = InstanceFile::from(self);
        let mut bytes = serde_json::to_vec(&file).map_err(|e| Error::Parse(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Instance> {
        let bytes = fs::read(path)?;
        let file: InstanceFile =
            serde_json::from_slice(&bytes).map_err(|e| Error::Parse(e.to_string()))?;
        let inst = file.into_instance();
        inst.validate()?;
        Ok(inst)
    }
}

/// On-disk schema. Keys and their order are part of the file contract.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: String,
    class: ClassId,
    seed: u64,
    n_plants: usize,
    n_depots: usize,
    n_customers: usize,
    f: Vec<Money>,
    b: Vec<Units>,
    g: Vec<Money>,
    p: Vec<Units>,
    q: Vec<Units>,
    c: Matrix<Money>,
    d: Matrix<Money>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            version: inst.meta.generator_version.clone(),
            class: inst.meta.class_id,
            seed: inst.meta.seed,
            n_plants: inst.n_plants,
            n_depots: inst.n_depots,
            n_customers: inst.n_customers,
            f: inst.plant_fixed_cost.clone(),
            b: inst.plant_capacity.clone(),
            g: inst.depot_fixed_cost.clone(),
            p: inst.depot_capacity.clone(),
            q: inst.demand.clone(),
            c: inst.supply_cost.clone(),
            d: inst.delivery_cost.clone(),
        }
    }
}

impl InstanceFile {
    fn into_instance(self) -> Instance {
        Instance {
            n_plants: self.n_plants,
            n_depots: self.n_depots,
            n_customers: self.n_customers,
            plant_fixed_cost: self.f,
            plant_capacity: self.b,
            depot_fixed_cost: self.g,
            depot_capacity: self.p,
            supply_cost: self.c,
            delivery_cost: self.d,
            demand: self.q,
            meta: InstanceMeta {
                class_id: self.class,
                seed: self.seed,
                generator_version: self.version,
            },
        }
    }
}

/// Open/close mask over plants and depots: the GA chromosome.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Individual {
    pub plants: Vec<bool>,
    pub depots: Vec<bool>,
}

impl Individual {
    pub fn new(plants: Vec<bool>, depots: Vec<bool>) -> Self {
        Self { plants, depots }
    }

    pub fn closed(n_plants: usize, n_depots: usize) -> Self {
        Self::new(vec![false; n_plants], vec![false; n_depots])
    }

    pub fn all_open(n_plants: usize, n_depots: usize) -> Self {
        Self::new(vec![true; n_plants], vec![true; n_depots])
    }

    pub fn random(sampler: &mut impl Sampler, n_plants: usize, n_depots: usize) -> Self {
        let plants = (0..n_plants).map(|_| sampler.chance(0.5)).collect();
        let depots = (0..n_depots).map(|_| sampler.chance(0.5)).collect();
        Self::new(plants, depots)
    }

    pub fn len(&self) -> usize {
        self.plants.len() + self.depots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bit at position `k` over the concatenated plant ++ depot mask.
    pub fn bit(&self, k: usize) -> bool {
        if k < self.plants.len() {
            self.plants[k]
        } else {
            self.depots[k - self.plants.len()]
        }
    }

    pub fn set_bit(&mut self, k: usize, value: bool) {
        let np = self.plants.len();
        if k < np {
            self.plants[k] = value;
        } else {
            self.depots[k - np] = value;
        }
    }

    pub fn flip_bit(&mut self, k: usize) {
        let cur = self.bit(k);
        self.set_bit(k, !cur);
    }

    pub fn open_plant_capacity(&self, inst: &Instance) -> Units {
        self.plants
            .iter()
            .zip(&inst.plant_capacity)
            .filter(|(open, _)| **open)
            .map(|(_, cap)| *cap)
            .sum()
    }

    pub fn open_depot_capacity(&self, inst: &Instance) -> Units {
        self.depots
            .iter()
            .zip(&inst.depot_capacity)
            .filter(|(open, _)| **open)
            .map(|(_, cap)| *cap)
            .sum()
    }

    /// Capacity feasibility: opened capacity covers total demand at both
    /// stages.
    pub fn is_feasible(&self, inst: &Instance) -> bool {
        let need = inst.total_demand();
        self.open_plant_capacity(inst) >= need && self.open_depot_capacity(inst) >= need
    }

    /// Chromosome bits as 0/1 reals, plants first (surrogate input encoding).
    pub fn input_bits(&self) -> impl Iterator<Item = f64> + '_ {
        self.plants
            .iter()
            .chain(self.depots.iter())
            .map(|&b| if b { 1.0 } else { 0.0 })
    }
}

/// Nearest integer to `num / den` for positive `den`, ties rounding up.
fn round_nearest(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    (2 * num + den).div_euclid(2 * den)
}

/// Per-class capacity multipliers and cost intervals (Table 1 of the
/// benchmark family): `b` over `[lo*B, hi*B]`, `p` over `[lo*P, hi*P]` where
/// `B = sum(q)/|I|`, `P = sum(q)/|J|`.
struct ClassProfile {
    cap_lo: i64,
    cap_hi: i64,
    supply: (i64, i64),
    delivery: (i64, i64),
}

fn class_profile(class: u8) -> ClassProfile {
    match class {
        1 => ClassProfile {
            cap_lo: 2,
            cap_hi: 5,
            supply: (35, 45),
            delivery: (55, 65),
        },
        2 => ClassProfile {
            cap_lo: 5,
            cap_hi: 10,
            supply: (35, 45),
            delivery: (55, 65),
        },
        3 => ClassProfile {
            cap_lo: 15,
            cap_hi: 25,
            supply: (35, 45),
            delivery: (800, 1000),
        },
        4 => ClassProfile {
            cap_lo: 5,
            cap_hi: 10,
            supply: (50, 100),
            delivery: (50, 100),
        },
        5 => ClassProfile {
            cap_lo: 5,
            cap_hi: 10,
            supply: (35, 45),
            delivery: (800, 1000),
        },
        _ => unreachable!("class id validated by caller"),
    }
}

const PLANT_COST_INTERVAL: (i64, i64) = (20_000, 30_000);
const DEPOT_COST_INTERVAL: (i64, i64) = (8_000, 12_000);
const DEMAND_INTERVAL: (i64, i64) = (10, 20);

/// Generate a benchmark instance with `n_depots = 2 * n_plants` and
/// `n_customers = 4 * n_plants`. Demands are drawn first; capacity interval
/// endpoints are multiples of `B = sum(q)/|I|` (resp. `P = sum(q)/|J|`)
/// rounded to the nearest integer before sampling.
pub fn generate_instance(class: u8, n_plants: usize, seed: u64) -> Result<Instance> {
    if !(1..=5).contains(&class) {
        return Err(Error::Validation(format!("class {class} outside 1..=5")));
    }
    if n_plants < 1 {
        return Err(Error::Validation("n_plants must be >= 1".into()));
    }
    let n_depots = 2 * n_plants;
    let n_customers = 4 * n_plants;
    let profile = class_profile(class);

    let draw_vec = |stream: u64, len: usize, lo: i64, hi: i64| -> Vec<i64> {
        let mut s = ChaChaSampler::new(seed, stream);
        (0..len).map(|_| s.int_between(lo, hi)).collect()
    };

    let demand = draw_vec(
        STREAM_DEMAND,
        n_customers,
        DEMAND_INTERVAL.0,
        DEMAND_INTERVAL.1,
    );
    let total_demand: i64 = demand.iter().sum();

    let plant_cap_lo = round_nearest(profile.cap_lo * total_demand, n_plants as i64);
    let plant_cap_hi = round_nearest(profile.cap_hi * total_demand, n_plants as i64);
    let depot_cap_lo = round_nearest(profile.cap_lo * total_demand, n_depots as i64);
    let depot_cap_hi = round_nearest(profile.cap_hi * total_demand, n_depots as i64);

    let plant_capacity = draw_vec(STREAM_PLANT_CAP, n_plants, plant_cap_lo, plant_cap_hi);
    let plant_fixed_cost = draw_vec(
        STREAM_PLANT_COST,
        n_plants,
        PLANT_COST_INTERVAL.0,
        PLANT_COST_INTERVAL.1,
    );
    let depot_fixed_cost = draw_vec(
        STREAM_DEPOT_COST,
        n_depots,
        DEPOT_COST_INTERVAL.0,
        DEPOT_COST_INTERVAL.1,
    );
    let depot_capacity = draw_vec(STREAM_DEPOT_CAP, n_depots, depot_cap_lo, depot_cap_hi);

    let mut supply_rng = ChaChaSampler::new(seed, STREAM_SUPPLY_COST);
    let supply_cost = Matrix::from_fn(n_plants, n_depots, |_, _| {
        supply_rng.int_between(profile.supply.0, profile.supply.1)
    });
    let mut delivery_rng = ChaChaSampler::new(seed, STREAM_DELIVERY_COST);
    let delivery_cost = Matrix::from_fn(n_depots, n_customers, |_, _| {
        delivery_rng.int_between(profile.delivery.0, profile.delivery.1)
    });

    let inst = Instance {
        n_plants,
        n_depots,
        n_customers,
        plant_fixed_cost,
        plant_capacity,
        depot_fixed_cost,
        depot_capacity,
        supply_cost,
        delivery_cost,
        demand,
        meta: InstanceMeta {
            class_id: ClassId::Benchmark(class),
            seed,
            generator_version: GENERATOR_VERSION.to_string(),
        },
    };
    inst.validate()?;
    Ok(inst)
}
