//! The named counterexamples of both galleries, recomputed into one report.

use wmcs_core::matching::AuditOptions;
use wmcs_core::{fixedpoint, matching, Error, Limits};

use crate::report::{Caps, Provenance, Report};
use crate::{env_limits, Result};

/// Fixed-point instances first, then matching instances.
pub fn names() -> Vec<&'static str> {
    fixedpoint::GALLERY_NAMES
        .iter()
        .chain(matching::GALLERY_NAMES.iter())
        .copied()
        .collect()
}

/// Checks every stated fact of one instance, or of all instances when `name`
/// is `None`.
pub fn run(name: Option<&str>) -> Result<Report> {
    let limits = env_limits(Limits::default())?;
    let selected: Vec<&str> = match name {
        None => names(),
        Some(n) if names().contains(&n) => vec![n],
        Some(n) => return Err(Error::UnknownGalleryName(n.to_string()).into()),
    };
    let descriptor = format!("gallery:{}", name.unwrap_or("--all"));
    let caps = Caps::new(&limits, &AuditOptions::default());
    let title = match name {
        Some(n) => format!("gallery instance {n}"),
        None => "counterexample gallery".to_string(),
    };
    let mut rep = Report::new(title, "gallery", Provenance::new(descriptor.as_bytes(), None, caps));
    for n in selected {
        if fixedpoint::GALLERY_NAMES.contains(&n) {
            let inst = fixedpoint::gallery(n)?;
            rep.witness(format!("{n}: {}", inst.description));
            for f in fixedpoint::check_gallery(&inst)? {
                rep.check(format!("{n}: {}", f.fact), f.expected, f.observed);
            }
        } else {
            let inst = matching::gallery(n)?;
            rep.witness(format!("{n}: {}", inst.description));
            for f in matching::check_gallery(&inst, &limits)? {
                rep.check(format!("{n}: {}", f.fact), f.expected, f.observed);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fact_holds() {
        let rep = run(None).unwrap();
        assert!(rep.passed(), "{}", rep.render());
        assert!(rep.verdicts.len() > 20);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(run(Some("nope")).unwrap_err().exit_code(), 2);
    }
}
