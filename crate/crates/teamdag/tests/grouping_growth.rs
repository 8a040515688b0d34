//! Grouping child beliefs by global public state blows up exponentially
//! on the chain family, while grouping by public observation stays
//! quadratic.

use teamdag::dag::{build, Grouping};
use teamdag::game::{Team, TeamSpec};
use teamdag::games::build_chain_game;
use teamdag::tfsdp::{inflate, make_timed, project, TeamTfsdp};

fn chain_tfsdp(c: usize) -> TeamTfsdp {
    let g = build_chain_game(c).unwrap();
    // Everyone but the trailing dummy player is on the team.
    let spec = TeamSpec::new(Team::Plus, (0..g.num_players - 1).collect());
    inflate(&make_timed(&project(&g, &spec)).unwrap())
}

fn edge_count(t: &TeamTfsdp, grouping: Grouping) -> usize {
    build(t, grouping).unwrap().raw_counts().1
}

#[test]
fn public_state_grouping_grows_geometrically() {
    let sizes: Vec<usize> = [6, 8, 10, 12]
        .iter()
        .map(|&c| edge_count(&chain_tfsdp(c), Grouping::PublicStates))
        .collect();
    for w in sizes.windows(2) {
        let ratio = w[1] as f64 / w[0] as f64;
        assert!(ratio >= 1.8, "growth {ratio} below 1.8x in {sizes:?}");
    }
}

#[test]
fn public_observation_grouping_stays_quadratic() {
    let cs: Vec<f64> = (3..=8).map(|i| (2 * i) as f64).collect();
    let ys: Vec<f64> = (3..=8)
        .map(|i| edge_count(&chain_tfsdp(2 * i), Grouping::PublicObservations) as f64)
        .collect();

    // Least-squares quadratic fit y = a c^2 + b c + d via normal equations.
    let n = cs.len();
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for i in 0..n {
        let basis = [cs[i] * cs[i], cs[i], 1.0];
        for r in 0..3 {
            for col in 0..3 {
                m[r][col] += basis[r] * basis[col];
            }
            rhs[r] += basis[r] * ys[i];
        }
    }
    // Gaussian elimination on the 3x3 system.
    for p in 0..3 {
        let pivot = (p..3).max_by(|&a, &b| m[a][p].abs().total_cmp(&m[b][p].abs())).unwrap();
        m.swap(p, pivot);
        rhs.swap(p, pivot);
        for r in p + 1..3 {
            let f = m[r][p] / m[p][p];
            for col in p..3 {
                m[r][col] -= f * m[p][col];
            }
            rhs[r] -= f * rhs[p];
        }
    }
    let mut coef = [0.0f64; 3];
    for p in (0..3).rev() {
        let mut v = rhs[p];
        for col in p + 1..3 {
            v -= m[p][col] * coef[col];
        }
        coef[p] = v / m[p][p];
    }

    let mean = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = (0..n)
        .map(|i| {
            let fit = coef[0] * cs[i] * cs[i] + coef[1] * cs[i] + coef[2];
            (ys[i] - fit).powi(2)
        })
        .sum();
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(r2 >= 0.99, "quadratic fit R^2 = {r2} on {ys:?}");
}

#[test]
fn long_chain_stays_small_under_observation_grouping() {
    let t = chain_tfsdp(16);
    let edges = edge_count(&t, Grouping::PublicObservations);
    assert!(edges <= 2000, "C = 16 produced {edges} edges");
}
