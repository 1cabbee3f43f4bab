//! Distributional checks of the benchmark generator: a thousand instances
//! per class, every drawn value inside its class interval.

use tscflp::instance::generate_instance;

struct Intervals {
    cap_lo: i64,
    cap_hi: i64,
    supply: (i64, i64),
    delivery: (i64, i64),
}

fn intervals(class: u8) -> Intervals {
    match class {
        1 => Intervals { cap_lo: 2, cap_hi: 5, supply: (35, 45), delivery: (55, 65) },
        2 => Intervals { cap_lo: 5, cap_hi: 10, supply: (35, 45), delivery: (55, 65) },
        3 => Intervals { cap_lo: 15, cap_hi: 25, supply: (35, 45), delivery: (800, 1000) },
        4 => Intervals { cap_lo: 5, cap_hi: 10, supply: (50, 100), delivery: (50, 100) },
        5 => Intervals { cap_lo: 5, cap_hi: 10, supply: (35, 45), delivery: (800, 1000) },
        _ => unreachable!(),
    }
}

fn round_half_up(num: i64, den: i64) -> i64 {
    (2 * num + den).div_euclid(2 * den)
}

#[test]
fn thousand_instances_per_class_stay_inside_their_intervals() {
    for class in 1..=5u8 {
        let iv = intervals(class);
        for seed in 0..1000u64 {
            let n_plants = 1 + (seed % 3) as usize;
            let inst = generate_instance(class, n_plants, seed).unwrap();
            assert_eq!(inst.n_depots, 2 * n_plants);
            assert_eq!(inst.n_customers, 4 * n_plants);

            assert!(inst.demand.iter().all(|&q| (10..=20).contains(&q)));
            assert!(inst
                .plant_fixed_cost
                .iter()
                .all(|&f| (20_000..=30_000).contains(&f)));
            assert!(inst
                .depot_fixed_cost
                .iter()
                .all(|&g| (8_000..=12_000).contains(&g)));
            assert!(inst
                .supply_cost
                .iter()
                .all(|&c| (iv.supply.0..=iv.supply.1).contains(&c)));
            assert!(inst
                .delivery_cost
                .iter()
                .all(|&d| (iv.delivery.0..=iv.delivery.1).contains(&d)));

            let total_q: i64 = inst.demand.iter().sum();
            let b_lo = round_half_up(iv.cap_lo * total_q, inst.n_plants as i64);
            let b_hi = round_half_up(iv.cap_hi * total_q, inst.n_plants as i64);
            assert!(inst.plant_capacity.iter().all(|&b| (b_lo..=b_hi).contains(&b)));
            let p_lo = round_half_up(iv.cap_lo * total_q, inst.n_depots as i64);
            let p_hi = round_half_up(iv.cap_hi * total_q, inst.n_depots as i64);
            assert!(inst.depot_capacity.iter().all(|&p| (p_lo..=p_hi).contains(&p)));

            assert!(inst.total_plant_capacity() >= total_q);
            assert!(inst.total_depot_capacity() >= total_q);
        }
    }
}

#[test]
fn generation_is_independent_of_call_order() {
    // Interleaving other generations must not perturb a given draw.
    let reference = generate_instance(3, 4, 5).unwrap();
    let _noise_a = generate_instance(1, 7, 99).unwrap();
    let _noise_b = generate_instance(5, 2, 123).unwrap();
    let again = generate_instance(3, 4, 5).unwrap();
    assert_eq!(reference, again);
}
