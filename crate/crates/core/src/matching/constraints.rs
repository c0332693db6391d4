//! Doctor-hospital matching under a joint feasibility constraint on how many
//! doctors each hospital hires, solved through an associated contracts
//! economy in which all hospitals act as one firm.

use super::rules::{ChoiceRule, Feasibility};
use super::{matching_cs, stable_solve, AuditOptions, ContractSet, ContractUniverse, CsDirection, Economy};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Hospital assigned to each doctor, if any.
pub type Matching = Vec<Option<usize>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintsMarket {
    doctors: Vec<String>,
    hospitals: Vec<String>,
    doctor_prefs: Vec<Vec<usize>>,
    hospital_prefs: Vec<Vec<usize>>,
    capacities: Vec<u32>,
    feasibility: Feasibility,
}

fn rank(list: &[usize], x: usize) -> Option<usize> {
    list.iter().position(|&y| y == x)
}

impl ConstraintsMarket {
    /// Preference lists rank the acceptable partners, best first.
    pub fn new(
        doctors: Vec<String>,
        hospitals: Vec<String>,
        doctor_prefs: Vec<Vec<usize>>,
        hospital_prefs: Vec<Vec<usize>>,
        capacities: Vec<u32>,
        feasibility: Feasibility,
    ) -> Result<Self> {
        let (nd, nh) = (doctors.len(), hospitals.len());
        let cap = Limits::default().max_divisions;
        if nh > cap {
            return Err(Error::SizeLimit {
                what: "hospitals".into(),
                size: nh,
                cap,
            });
        }
        if doctor_prefs.len() != nd || hospital_prefs.len() != nh || capacities.len() != nh {
            return Err(Error::Invalid("one preference list per agent and one capacity per hospital".into()));
        }
        if feasibility.dims() != nh {
            return Err(Error::Invalid(format!(
                "feasibility over {} hospitals, market has {nh}",
                feasibility.dims()
            )));
        }
        let check = |lists: &[Vec<usize>], bound: usize| {
            lists.iter().all(|l| {
                l.iter().all(|&x| x < bound) && (1..l.len()).all(|i| !l[..i].contains(&l[i]))
            })
        };
        if !check(&doctor_prefs, nh) || !check(&hospital_prefs, nd) {
            return Err(Error::Invalid("preference lists must name distinct known agents".into()));
        }
        if let Some(m) = feasibility.maxima().iter().find(|m| m.iter().zip(&capacities).any(|(a, b)| a > b)) {
            return Err(Error::InfeasibleCapacity(format!("{m:?}")));
        }
        Ok(ConstraintsMarket {
            doctors,
            hospitals,
            doctor_prefs,
            hospital_prefs,
            capacities,
            feasibility,
        })
    }

    pub fn doctors(&self) -> &[String] {
        &self.doctors
    }

    pub fn hospitals(&self) -> &[String] {
        &self.hospitals
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn feasibility(&self) -> &Feasibility {
        &self.feasibility
    }

    /// The same market under another feasibility constraint.
    pub fn with_feasibility(&self, feasibility: Feasibility) -> Result<Self> {
        ConstraintsMarket::new(
            self.doctors.clone(),
            self.hospitals.clone(),
            self.doctor_prefs.clone(),
            self.hospital_prefs.clone(),
            self.capacities.clone(),
            feasibility,
        )
    }

    pub fn counts(&self, mu: &Matching) -> Vec<u32> {
        let mut w = vec![0u32; self.hospitals.len()];
        for h in mu.iter().flatten() {
            w[*h] += 1;
        }
        w
    }

    /// Whether doctor `d` strictly prefers `a` to `b` (`None` = unmatched).
    pub fn doctor_prefers(&self, d: usize, a: Option<usize>, b: Option<usize>) -> bool {
        let r = |o: Option<usize>| match o {
            None => Some(self.doctor_prefs[d].len()),
            Some(h) => rank(&self.doctor_prefs[d], h),
        };
        match (r(a), r(b)) {
            (Some(x), Some(y)) => x < y,
            (Some(_), None) => true,
            _ => false,
        }
    }

    pub fn format(&self, mu: &Matching) -> String {
        let parts: Vec<String> = mu
            .iter()
            .enumerate()
            .map(|(d, h)| format!("{}-{}", self.doctors[d], h.map_or("none", |h| self.hospitals[h].as_str())))
            .collect();
        format!("[{}]", parts.join(", "))
    }

    fn all_matchings(&self) -> Vec<Matching> {
        let nh = self.hospitals.len();
        let mut out = vec![Vec::new()];
        for _ in 0..self.doctors.len() {
            out = out
                .into_iter()
                .flat_map(|m: Matching| {
                    (0..=nh).map(move |k| {
                        let mut m = m.clone();
                        m.push(if k == nh { None } else { Some(k) });
                        m
                    })
                })
                .collect();
        }
        out
    }
}

/// Contract `(d, h)` has index `d·|H| + h`; the single firm holds them all.
pub fn constraints_to_contracts(market: &ConstraintsMarket) -> Result<Economy> {
    let (nd, nh) = (market.doctors.len(), market.hospitals.len());
    let contracts = (0..nd)
        .flat_map(|d| {
            (0..nh).map(move |h| super::Contract {
                label: format!("({},{})", market.doctors[d], market.hospitals[h]),
                firm: 0,
                worker: d,
            })
        })
        .collect();
    let universe = ContractUniverse::new(vec!["hospitals".into()], market.doctors.clone(), contracts)?;
    let groups = (0..nh)
        .map(|h| market.hospital_prefs[h].iter().map(|&d| d * nh + h).collect())
        .collect();
    let firm = ChoiceRule::quota(nd * nh, groups, market.feasibility.clone())?;
    let doctors = (0..nd)
        .map(|d| ChoiceRule::ranking(nh, &market.doctor_prefs[d]))
        .collect::<Result<Vec<_>>>()?;
    Economy::new(universe, vec![firm], doctors)
}

pub fn matching_to_contracts(market: &ConstraintsMarket, mu: &Matching) -> ContractSet {
    let nh = market.hospitals.len();
    mu.iter()
        .enumerate()
        .filter_map(|(d, h)| h.map(|h| 1u64 << (d * nh + h)))
        .fold(0, |m, b| m | b)
}

pub fn contracts_to_matching(market: &ConstraintsMarket, set: ContractSet) -> Result<Matching> {
    let nh = market.hospitals.len();
    let mut mu = vec![None; market.doctors.len()];
    for i in super::bits(set) {
        let (d, h) = (i / nh, i % nh);
        if d >= mu.len() {
            return Err(Error::Invalid(format!("contract index {i} out of range")));
        }
        if mu[d].is_some() {
            return Err(Error::Allocation(market.doctors[d].clone()));
        }
        mu[d] = Some(h);
    }
    Ok(mu)
}

/// Feasible, individually rational, and every blocking pair is one the
/// constraint excuses: adding the doctor would break feasibility and the
/// hospital prefers all its current doctors.
pub fn weakly_stable(market: &ConstraintsMarket, mu: &Matching) -> bool {
    let nh = market.hospitals.len();
    if mu.len() != market.doctors.len() || mu.iter().flatten().any(|&h| h >= nh) {
        return false;
    }
    let w = market.counts(mu);
    if !market.feasibility.allows(&w) || w.iter().zip(&market.capacities).any(|(a, b)| a > b) {
        return false;
    }
    for (d, h) in mu.iter().enumerate() {
        if let Some(h) = *h {
            if rank(&market.doctor_prefs[d], h).is_none() || rank(&market.hospital_prefs[h], d).is_none() {
                return false;
            }
        }
    }
    for d in 0..mu.len() {
        for h in 0..nh {
            if !market.doctor_prefers(d, Some(h), mu[d]) {
                continue;
            }
            let Some(rd) = rank(&market.hospital_prefs[h], d) else {
                continue;
            };
            let current: Vec<usize> = (0..mu.len())
                .filter(|&e| mu[e] == Some(h))
                .map(|e| rank(&market.hospital_prefs[h], e).unwrap())
                .collect();
            let blocks = w[h] < market.capacities[h] || current.iter().any(|&re| rd < re);
            if !blocks {
                continue;
            }
            let mut more = w.clone();
            more[h] += 1;
            let excused = !market.feasibility.allows(&more) && current.iter().all(|&re| re < rd);
            if !excused {
                return false;
            }
        }
    }
    true
}

/// Every weakly stable matching, by enumeration.
pub fn weakly_stable_set(market: &ConstraintsMarket) -> Vec<Matching> {
    market
        .all_matchings()
        .into_iter()
        .filter(|m| weakly_stable(market, m))
        .collect()
}

/// Matchings on which weak stability and stability of the associated
/// contracts allocation disagree; empty when the two notions coincide.
pub fn claim_equivalence(market: &ConstraintsMarket, limits: &Limits) -> Result<Vec<Matching>> {
    let economy = constraints_to_contracts(market)?;
    if economy.universe().len() > limits.stable_set_contracts {
        return Err(Error::SizeLimit {
            what: "doctor-hospital pairs".into(),
            size: economy.universe().len(),
            cap: limits.stable_set_contracts,
        });
    }
    let mut bad = Vec::new();
    for mu in market.all_matchings() {
        if weakly_stable(market, &mu) != economy.is_stable(matching_to_contracts(market, &mu))? {
            bad.push(mu);
        }
    }
    Ok(bad)
}

pub fn weak_stable_solve(market: &ConstraintsMarket, opts: &AuditOptions) -> Result<Matching> {
    let economy = constraints_to_contracts(market)?;
    let sol = stable_solve(&economy, opts)?;
    let mu = contracts_to_matching(market, sol.allocation)?;
    if !weakly_stable(market, &mu) {
        return Err(Error::TheoremViolation(format!(
            "stable allocation maps to {}, which is not weakly stable",
            market.format(&mu)
        )));
    }
    Ok(mu)
}

/// `tight` is weakly stable under the first market, `loose` under the
/// second; every doctor weakly prefers `loose`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintsCs {
    pub direction: CsDirection,
    pub tight: Matching,
    pub loose: Matching,
}

/// Pairs weakly stable matchings of `market` with weakly stable matchings of
/// `relaxed`, whose feasibility must contain that of `market`.
pub fn constraints_cs(
    market: &ConstraintsMarket,
    relaxed: &ConstraintsMarket,
    limits: &Limits,
    opts: &AuditOptions,
) -> Result<Vec<ConstraintsCs>> {
    let same = market.doctors == relaxed.doctors
        && market.hospitals == relaxed.hospitals
        && market.doctor_prefs == relaxed.doctor_prefs
        && market.hospital_prefs == relaxed.hospital_prefs
        && market.capacities == relaxed.capacities;
    if !same {
        return Err(Error::Hypothesis("markets differ in more than the feasibility constraint".into()));
    }
    if !relaxed.feasibility.contains(&market.feasibility) {
        return Err(Error::Hypothesis("the second constraint is not weakly more permissive".into()));
    }
    let g = constraints_to_contracts(market)?;
    let g2 = constraints_to_contracts(relaxed)?;
    let mut out = Vec::new();
    for w in matching_cs(&g, &g2, limits, opts)? {
        let tight = contracts_to_matching(market, w.first)?;
        let loose = contracts_to_matching(market, w.second)?;
        let ok = weakly_stable(market, &tight)
            && weakly_stable(relaxed, &loose)
            && (0..tight.len()).all(|d| !market.doctor_prefers(d, tight[d], loose[d]));
        if !ok {
            return Err(Error::TheoremViolation(format!(
                "{} and {} are not ordered as predicted",
                market.format(&tight),
                market.format(&loose)
            )));
        }
        out.push(ConstraintsCs {
            direction: w.direction,
            tight,
            loose,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(p: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{p}{i}")).collect()
    }

    /// Three doctors who all prefer h1, two hospitals of capacity 2, and a
    /// regional cap on total hires.
    fn regional(total: u32) -> ConstraintsMarket {
        let caps = [2, 2];
        let f = Feasibility::from_predicate(&caps, |w| w.iter().sum::<u32>() <= total).unwrap();
        ConstraintsMarket::new(
            names("d", 3),
            names("h", 2),
            vec![vec![0, 1], vec![0, 1], vec![1, 0]],
            vec![vec![0, 1, 2], vec![2, 1, 0]],
            caps.to_vec(),
            f,
        )
        .unwrap()
    }

    /// Individually rational, within capacity, and no blocking pair at all.
    fn classically_stable(m: &ConstraintsMarket, mu: &Matching) -> bool {
        let w = m.counts(mu);
        let ir = w.iter().zip(&m.capacities).all(|(a, b)| a <= b)
            && mu.iter().enumerate().all(|(d, h)| {
                h.is_none_or(|h| rank(&m.doctor_prefs[d], h).is_some() && rank(&m.hospital_prefs[h], d).is_some())
            });
        ir && (0..mu.len()).all(|d| {
            (0..m.hospitals.len()).all(|h| {
                let rd = rank(&m.hospital_prefs[h], d);
                !(m.doctor_prefers(d, Some(h), mu[d])
                    && rd.is_some()
                    && (w[h] < m.capacities[h]
                        || (0..mu.len()).any(|e| mu[e] == Some(h) && rank(&m.hospital_prefs[h], e) > rd)))
            })
        })
    }

    #[test]
    fn capacity_violation_is_rejected() {
        let f = Feasibility::new(2, vec![vec![3, 0]]).unwrap();
        let e = ConstraintsMarket::new(
            names("d", 1),
            names("h", 2),
            vec![vec![0]],
            vec![vec![0], vec![0]],
            vec![2, 2],
            f,
        )
        .unwrap_err();
        assert!(matches!(e, Error::InfeasibleCapacity(_)));
    }

    #[test]
    fn unconstrained_weak_stability_is_classical() {
        let m = regional(4);
        let mut some = 0;
        for mu in m.all_matchings() {
            assert_eq!(weakly_stable(&m, &mu), classically_stable(&m, &mu), "{}", m.format(&mu));
            some += classically_stable(&m, &mu) as usize;
        }
        assert!(some > 0);
    }

    #[test]
    fn regional_cap_solve_and_claim() {
        let m = regional(2);
        let mu = weak_stable_solve(&m, &AuditOptions::default()).unwrap();
        assert!(weakly_stable(&m, &mu));
        assert!(claim_equivalence(&m, &Limits::default()).unwrap().is_empty());
        let economy = constraints_to_contracts(&m).unwrap();
        let image: Vec<Matching> = economy
            .stable_set(&Limits::default())
            .unwrap()
            .into_iter()
            .map(|z| contracts_to_matching(&m, z).unwrap())
            .collect();
        let mut brute = weakly_stable_set(&m);
        let mut image = image;
        brute.sort();
        image.sort();
        assert_eq!(brute, image);
        assert!(!brute.is_empty());
        // the cap binds: nobody holds three doctors' worth of jobs
        assert!(brute.iter().all(|mu| m.counts(mu).iter().sum::<u32>() <= 2));
    }

    #[test]
    fn raising_the_cap_helps_every_doctor() {
        let tight = regional(2);
        let loose = regional(3);
        let ws = constraints_cs(&tight, &loose, &Limits::default(), &AuditOptions::default()).unwrap();
        assert!(ws.iter().any(|w| w.direction == CsDirection::Forward));
        for w in &ws {
            for d in 0..3 {
                assert!(!tight.doctor_prefers(d, w.tight[d], w.loose[d]));
            }
        }
        // someone is strictly better off once the third job opens
        let f = ws.iter().find(|w| w.direction == CsDirection::Forward).unwrap();
        assert!((0..3).any(|d| tight.doctor_prefers(d, f.loose[d], f.tight[d])));
        assert!(matches!(
            constraints_cs(&loose, &tight, &Limits::default(), &AuditOptions::default()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn matching_round_trip() {
        let m = regional(2);
        for mu in m.all_matchings() {
            assert_eq!(contracts_to_matching(&m, matching_to_contracts(&m, &mu)).unwrap(), mu);
        }
    }
}
