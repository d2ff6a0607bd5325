#![allow(dead_code)]

use craft_core::hypotheses::{
    erm_binary_classifier, erm_multiclass_encoder, erm_odds_predictor, ClassifierClass, DiscreteGrid, EncoderClass,
    LearnedEncoder, LookupClassifiers, LookupEncoders,
};
use craft_core::Bits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OBS_WIDTH: usize = 3;

fn softplus(z: f64) -> f64 {
    (1.0 + z.exp()).ln()
}

fn random_obs(rng: &mut ChaCha8Rng) -> Bits {
    let bools: Vec<bool> = (0..OBS_WIDTH).map(|_| rng.gen()).collect();
    Bits::from_bools(&bools)
}

fn key(x: &Bits) -> usize {
    (0..OBS_WIDTH).filter(|&i| x.get(i)).map(|i| 1 << i).sum()
}

fn sample(rng: &mut ChaCha8Rng, n: usize) -> Vec<Bits> {
    (0..n).map(|_| random_obs(rng)).collect()
}

fn encoders(rng: &mut ChaCha8Rng) -> LookupEncoders {
    let count = rng.gen_range(1..=8);
    LookupEncoders {
        tables: (0..count)
            .map(|_| (0..1 << OBS_WIDTH).map(|_| rng.gen_range(0..2)).collect())
            .collect(),
        n_outputs: 2,
    }
}

/// Minimum over every encoder pair and every full table of the summed
/// logistic loss, evaluated sample by sample.
fn brute_odds(
    pa: &[(Bits, Bits)],
    pb: &[(Bits, Bits)],
    phi_h: &LookupEncoders,
    phi_next: &LookupEncoders,
    grid: &DiscreteGrid,
) -> f64 {
    let values = grid.values();
    let g = values.len();
    let mut best = f64::INFINITY;
    for e in 0..phi_h.tables.len() {
        for f in 0..phi_next.tables.len() {
            for code in 0..g.pow(4) {
                let table: Vec<f64> = (0..4).map(|c| values[code / g.pow(c) % g]).collect();
                let at = |x: &Bits, y: &Bits| table[phi_h.encode(e, x) * 2 + phi_next.encode(f, y)];
                let loss: f64 = pa.iter().map(|(x, y)| softplus(-at(x, y))).sum::<f64>()
                    + pb.iter().map(|(x, y)| softplus(at(x, y))).sum::<f64>();
                best = best.min(loss);
            }
        }
    }
    best
}

fn brute_binary(pos: &[Bits], neg: &[Bits], class: &LookupClassifiers) -> f64 {
    (0..class.tables.len())
        .map(|g| {
            let fp = pos.iter().filter(|x| !class.tables[g][key(x)]).count() as f64 / pos.len() as f64;
            let fneg = neg.iter().filter(|x| class.tables[g][key(x)]).count() as f64 / neg.len() as f64;
            fp + fneg
        })
        .fold(f64::INFINITY, f64::min)
}

fn brute_multiclass(sets: &[Vec<Bits>], class: &LookupEncoders) -> f64 {
    let mut best = f64::INFINITY;
    for e in 0..class.tables.len() {
        for perm in [[0, 1], [1, 0]] {
            let loss: f64 = sets
                .iter()
                .enumerate()
                .map(|(s, d)| d.iter().filter(|x| perm[class.tables[e][key(x)]] != s).count() as f64 / d.len() as f64)
                .sum();
            best = best.min(loss);
        }
    }
    best
}

#[derive(Debug, Default, Clone, Copy)]
pub struct OracleGap {
    pub odds: f64,
    pub binary: f64,
    pub multiclass: f64,
}

impl OracleGap {
    pub fn max(&self) -> f64 {
        self.odds.max(self.binary).max(self.multiclass)
    }
}

/// Largest `|fast - brute force|` loss gap for each ERM routine on one random
/// instance, also counting the loss the fast routine's own choice attains.
pub fn oracle_gap(seed: u64) -> OracleGap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (na, nb) = (rng.gen_range(1..=32), rng.gen_range(1..=32));
    let pa: Vec<(Bits, Bits)> = (0..na).map(|_| (random_obs(&mut rng), random_obs(&mut rng))).collect();
    let pb: Vec<(Bits, Bits)> = (0..nb).map(|_| (random_obs(&mut rng), random_obs(&mut rng))).collect();
    let phi_h = encoders(&mut rng);
    let phi_next = encoders(&mut rng);
    let grid = DiscreteGrid::new(rng.gen_range(1..=3), rng.gen_range(0.1..1.5));

    let ra: Vec<(&Bits, &Bits)> = pa.iter().map(|(x, y)| (x, y)).collect();
    let rb: Vec<(&Bits, &Bits)> = pb.iter().map(|(x, y)| (x, y)).collect();
    let fit = erm_odds_predictor(&ra, &rb, &phi_h, &phi_next, grid).unwrap();
    let own: f64 = pa
        .iter()
        .map(|(x, y)| softplus(-fit.predictor.predict(&phi_h, &phi_next, x, y)))
        .sum::<f64>()
        + pb.iter()
            .map(|(x, y)| softplus(fit.predictor.predict(&phi_h, &phi_next, x, y)))
            .sum::<f64>();
    let brute = brute_odds(&pa, &pb, &phi_h, &phi_next, &grid);
    let odds = (fit.loss - brute).abs().max((own - brute).abs());

    let (np, nn) = (rng.gen_range(1..=32), rng.gen_range(1..=32));
    let pos = sample(&mut rng, np);
    let neg = sample(&mut rng, nn);
    let count = rng.gen_range(1..=8);
    let classifiers = LookupClassifiers {
        tables: (0..count)
            .map(|_| (0..1 << OBS_WIDTH).map(|_| rng.gen()).collect())
            .collect(),
    };
    let rp: Vec<&Bits> = pos.iter().collect();
    let rn: Vec<&Bits> = neg.iter().collect();
    let bfit = erm_binary_classifier(&rp, &rn, &classifiers).unwrap();
    let own = brute_binary(
        &pos,
        &neg,
        &LookupClassifiers {
            tables: vec![classifiers.tables[bfit.index].clone()],
        },
    );
    let brute = brute_binary(&pos, &neg, &classifiers);
    let binary = (bfit.loss - brute).abs().max((own - brute).abs());
    assert!(bfit.index < classifiers.len());

    let sizes = [rng.gen_range(1..=32), rng.gen_range(1..=32)];
    let sets: Vec<Vec<Bits>> = sizes.iter().map(|&n| sample(&mut rng, n)).collect();
    let class = encoders(&mut rng);
    let refs: Vec<Vec<&Bits>> = sets.iter().map(|d| d.iter().collect()).collect();
    let mfit = erm_multiclass_encoder(&refs, &class).unwrap();
    let own: f64 = sets
        .iter()
        .enumerate()
        .map(|(s, d)| d.iter().filter(|x| mfit.encoder.encode(&class, x) != s).count() as f64 / d.len() as f64)
        .sum();
    let brute = brute_multiclass(&sets, &class);
    let multiclass = (mfit.loss - brute).abs().max((own - brute).abs());
    assert!(matches!(mfit.encoder, LearnedEncoder::Relabeled { .. }));

    OracleGap {
        odds,
        binary,
        multiclass,
    }
}
