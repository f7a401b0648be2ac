use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use harmonic_core::galois::{profile_json, random_cover_spec, CoverSpec, HarmonicCover};
use harmonic_core::harmonic::{ActionJson, GraphAction};
use harmonic_core::maximal::{
    build_maximal, classify_genus, classify_range, compare_rho_variants, format_table, miller_check,
    ClassifyOptions, MaximalCover, MillerFamily,
};
use harmonic_core::multigraph::{EdgeId, MorphismJson, VertexId};
use harmonic_core::oriented::{canonical_orientation, surface_genus_check, OrientedJson};
use harmonic_core::permgroup::catalog::{resolve_group, Catalog};
use harmonic_core::permgroup::search::{search_23_pairs, PairSearchOptions};
use harmonic_core::permgroup::{left_cosets, Permutation, PermutationGroup, Subgroup, ELEMENT_LIMIT};
use harmonic_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::output::Outcome;
use crate::{ActionCmd, Cli, Command, CoverCmd, Family, GroupCmd, MaximalCmd, PairArgs, SurfaceCmd};

pub fn run(cli: &Cli) -> Result<Outcome> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Group(c) => group(&ctx, c),
        Command::Action(c) => action(&ctx, c),
        Command::Cover(c) => cover(&ctx, c),
        Command::Maximal(c) => maximal(&ctx, c),
        Command::Surface(c) => surface(&ctx, c),
    }
}

struct Context {
    catalog: Catalog,
    seed: u64,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let catalog = match &cli.global.catalog {
            Some(path) => Catalog::load(path)?,
            None => Catalog::shipped()?,
        };
        Ok(Context {
            catalog,
            seed: cli.global.seed,
        })
    }

    fn group(&self, name: &str) -> Result<PermutationGroup> {
        resolve_group(name, &self.catalog, false)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn perm_json(p: &Permutation) -> Value {
    json!({ "images": p.images(), "cycles": p.to_string() })
}

fn parse_perms(group: &PermutationGroup, texts: &[String]) -> Result<Vec<Permutation>> {
    texts.iter().map(|t| Permutation::parse(t, group.degree())).collect()
}

/// `τ,σ` in cycle notation (commas inside parentheses are allowed), or
/// `[[..],[..]]`.
fn parse_pair(group: &PermutationGroup, text: &str) -> Result<(Permutation, Permutation)> {
    let text = text.trim();
    let parts: Vec<String> = if text.starts_with("[[") {
        let lists: Vec<Vec<u32>> = serde_json::from_str(text)?;
        lists.iter().map(|l| serde_json::to_string(l).unwrap()).collect()
    } else {
        let mut parts = vec![String::new()];
        let mut depth = 0;
        for c in text.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' | ';' if depth == 0 => {
                    parts.push(String::new());
                    continue;
                }
                _ => {}
            }
            parts.last_mut().unwrap().push(c);
        }
        parts
    };
    if parts.len() != 2 {
        return Err(Error::InvalidPermutation(format!("expected two permutations in {text:?}")));
    }
    let d = group.degree();
    Ok((Permutation::parse(&parts[0], d)?, Permutation::parse(&parts[1], d)?))
}

fn pick_pair(group: &PermutationGroup, args: &PairArgs) -> Result<(Permutation, Permutation)> {
    if let Some(text) = &args.pair {
        return parse_pair(group, text);
    }
    let opts = PairSearchOptions {
        product_order: args.product_order,
        all_involutions: false,
    };
    let search = search_23_pairs(group, &opts)?;
    let first = search.pairs.into_iter().next().ok_or_else(|| {
        Error::InvalidGroup(match args.product_order {
            Some(k) => format!("{} has no (2,3)-generating pair with product of order {k}", group.name()),
            None => format!("{} is not (2,3)-generated", group.name()),
        })
    })?;
    Ok((first.tau, first.sigma))
}

fn group(ctx: &Context, cmd: &GroupCmd) -> Result<Outcome> {
    match cmd {
        GroupCmd::Order(g) => {
            let group = ctx.group(&g.group)?;
            let spectrum = if group.order() <= ELEMENT_LIMIT {
                Some(group.order_spectrum()?)
            } else {
                None
            };
            Ok(Outcome::ok(json!({
                "name": group.name(),
                "order": group.order(),
                "degree": group.degree(),
                "generators": group.generators().iter().map(perm_json).collect::<Vec<_>>(),
                "order_spectrum": spectrum,
            })))
        }
        GroupCmd::Elements { group: g, orders } => {
            let group = ctx.group(&g.group)?;
            let table = group.elements()?;
            let elements: Vec<Value> = (0..table.len())
                .filter(|&i| orders.is_empty() || orders.contains(&table.element_order(i)))
                .map(|i| {
                    let mut v = perm_json(table.element(i));
                    v["order"] = table.element_order(i).into();
                    v
                })
                .collect();
            Ok(Outcome::ok(json!({ "group": group.name(), "count": elements.len(), "elements": elements })))
        }
        GroupCmd::Cosets { group: g, subgroup } => {
            let group = ctx.group(&g.group)?;
            let sub = Subgroup::new(&group, parse_perms(&group, subgroup)?)?;
            let cosets = left_cosets(&group, &sub)?;
            let table = group.elements()?;
            let mut members: Vec<Vec<Value>> = vec![Vec::new(); cosets.len()];
            for (i, &c) in cosets.coset_of.iter().enumerate() {
                members[c].push(table.element(i).to_string().into());
            }
            let list: Vec<Value> = cosets
                .representatives
                .iter()
                .zip(members)
                .map(|(&r, m)| json!({ "representative": perm_json(table.element(r)), "members": m }))
                .collect();
            Ok(Outcome::ok(json!({
                "group": group.name(),
                "subgroup_order": sub.order(),
                "index": cosets.len(),
                "cosets": list,
            })))
        }
        GroupCmd::Search {
            group: g,
            product_order,
            all,
            orders,
        } => {
            if orders.as_slice() != [2, 3] {
                return Err(Error::Unsupported(format!("orders {orders:?}; only 2 3 is implemented")));
            }
            let group = ctx.group(&g.group)?;
            let opts = PairSearchOptions {
                product_order: *product_order,
                all_involutions: *all,
            };
            let search = search_23_pairs(&group, &opts)?;
            let pairs: Vec<Value> = search
                .pairs
                .iter()
                .map(|p| json!({ "tau": perm_json(&p.tau), "sigma": perm_json(&p.sigma), "product_order": p.product_order }))
                .collect();
            Ok(Outcome::ok(json!({
                "group": group.name(),
                "order": group.order(),
                "generated": !search.is_empty(),
                "involution_classes": search.involution_classes,
                "total_count": search.total_count,
                "pairs": pairs,
            })))
        }
        GroupCmd::Catalog { order } => {
            let sections: Vec<Value> = ctx
                .catalog
                .sections()
                .filter(|s| order.is_none_or(|o| s.order == o))
                .map(|s| {
                    json!({
                        "order": s.order,
                        "complete": s.complete,
                        "groups": s.groups.iter().map(|g| g.name()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({ "sections": sections })))
        }
    }
}

fn load_action(ctx: &Context, path: &Path) -> Result<GraphAction> {
    read_json::<ActionJson>(path)?.build(&ctx.catalog)
}

fn action(ctx: &Context, cmd: &ActionCmd) -> Result<Outcome> {
    match cmd {
        ActionCmd::Check { action, subgroups } => {
            let a = load_action(ctx, &action.action)?;
            let report = a.is_harmonic_action();
            let flipped = a.flipped_edges();
            let mut flipping = BTreeMap::new();
            for &e in &flipped {
                let inv: Vec<String> = a.flipping_involutions(e)?.iter().map(|p| p.to_string()).collect();
                flipping.insert(e, inv);
            }
            let by_subgroups = if *subgroups { Some(a.harmonic_by_subgroups()?) } else { None };
            Ok(Outcome::ok(json!({
                "group": a.group().name(),
                "order": a.group().order(),
                "faithfulness": a.faithfulness(),
                "harmonic": report.harmonic,
                "witness": report.witness,
                "harmonic_by_subgroups": by_subgroups,
                "flipped_edges": flipped,
                "flipping_involutions": flipping,
            })))
        }
        ActionCmd::Quotient { action, subgroup, dot } => {
            let a = load_action(ctx, &action.action)?;
            let q = if subgroup.is_empty() {
                a.full_quotient()?
            } else {
                a.quotient(&Subgroup::new(a.group(), parse_perms(a.group(), subgroup)?)?)?
            };
            let harmonic = q.projection.is_harmonic();
            let mut out = Outcome::ok(json!({
                "quotient": q.quotient.to_json(),
                "projection": q.projection.to_json(),
                "removed_loops": q.removed_loops,
                "projection_harmonic": harmonic.as_ref().ok().map(|r| r.harmonic),
                "witness": harmonic.as_ref().ok().and_then(|r| r.witness.clone()),
            }))
            .with_file(dot.as_ref(), || q.quotient.to_dot("quotient", None));
            if let Err(e) = harmonic {
                out = out.diagnose("harmonicity", [e.to_string()]);
            }
            Ok(out)
        }
        ActionCmd::Unflip(action) => {
            let a = load_action(ctx, &action.action)?;
            let u = a.unflip()?;
            Ok(Outcome::ok(serde_json::to_value(u.to_json())?))
        }
        ActionCmd::Flip { action, keep } => {
            let a = load_action(ctx, &action.action)?;
            let skip: BTreeSet<EdgeId> = keep.iter().map(|&e| EdgeId(e)).collect();
            let f = a.flip_all_except(&skip)?;
            Ok(Outcome::ok(serde_json::to_value(f.to_json())?))
        }
        ActionCmd::Morphism { morphism } => {
            let m = read_json::<MorphismJson>(morphism)?.build()?;
            let report = m.is_harmonic()?;
            let degree = if report.harmonic { Some(m.degree()?) } else { None };
            Ok(Outcome::ok(json!({
                "harmonic": report.harmonic,
                "witness": report.witness,
                "degree": degree,
                "multiplicities": report.multiplicities,
                "degenerate": report.degenerate,
                "vertical_edges": m.vertical_edges(),
            })))
        }
    }
}

fn load_cover(ctx: &Context, path: &Path) -> Result<HarmonicCover> {
    read_json::<CoverSpec>(path)?.build(&ctx.catalog)
}

fn cover_outcome(c: &HarmonicCover, payload: Value) -> Outcome {
    Outcome::ok(payload).diagnose("dropped_multiset_entry", c.diagnostics().iter().cloned())
}

fn cover(ctx: &Context, cmd: &CoverCmd) -> Result<Outcome> {
    match cmd {
        CoverCmd::Build { spec, dot } => {
            let c = load_cover(ctx, &spec.spec)?;
            let mut payload = serde_json::to_value(c.to_spec())?;
            let g = c.graph();
            payload["profile"] = profile_json(&c)?;
            payload["summary"] = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "connected": c.is_connected(),
                "genus": g.genus().ok(),
                "vertical_edges": c.vertical_edges().len(),
            });
            let labels: BTreeMap<VertexId, String> = c
                .fiber_index()
                .iter()
                .flat_map(|(x, ys)| ys.iter().enumerate().map(move |(i, &y)| (y, format!("{x}.{i}"))))
                .collect();
            Ok(cover_outcome(&c, payload).with_file(dot.as_ref(), || g.to_dot("cover", Some(&labels))))
        }
        CoverCmd::Profile(spec) => {
            let c = load_cover(ctx, &spec.spec)?;
            Ok(cover_outcome(&c, profile_json(&c)?))
        }
        CoverCmd::Rh { spec, strict } => {
            let c = load_cover(ctx, &spec.spec)?;
            let rh = c.riemann_hurwitz(*strict)?;
            let holds = rh.holds;
            let mut out = cover_outcome(&c, serde_json::to_value(rh)?);
            out.failed = !holds;
            Ok(out)
        }
        CoverCmd::Classify(spec) => {
            let c = load_cover(ctx, &spec.spec)?;
            Ok(cover_outcome(&c, serde_json::to_value(c.classify_branch_locus()?)?))
        }
        CoverCmd::Random {
            group,
            count,
            max_base,
            max_order,
            emit,
        } => {
            let groups: Vec<PermutationGroup> = match group {
                Some(name) => vec![ctx.group(name)?],
                None => ctx.catalog.groups().filter(|g| g.order() <= *max_order).cloned().collect(),
            };
            if groups.is_empty() {
                return Err(Error::Catalog(format!("no catalog groups of order <= {max_order}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let specs = (0..*count)
                .map(|i| random_cover_spec(&groups[i % groups.len()], &mut rng, *max_base))
                .collect::<Result<Vec<_>>>()?;
            let results: Vec<(bool, usize, Option<String>)> = specs
                .par_iter()
                .map(|spec| {
                    let order = spec.group.resolve(&ctx.catalog).map(|g| g.order()).unwrap_or(0);
                    let checked = spec.build(&ctx.catalog).and_then(|c| c.ramification_profile());
                    match checked {
                        Ok(p) => {
                            let ok = p.vertices.values().all(|l| l.m * l.f * l.n == order);
                            (ok, p.vertices.len(), None)
                        }
                        Err(e) => (false, 0, Some(e.to_string())),
                    }
                })
                .collect();
            let violations = results.iter().filter(|r| !r.0).count();
            let vertices: usize = results.iter().map(|r| r.1).sum();
            let errors: Vec<String> = results.iter().filter_map(|r| r.2.clone()).collect();
            let mut payload = json!({
                "seed": ctx.seed,
                "covers": specs.len(),
                "groups": groups.iter().map(|g| g.name()).collect::<Vec<_>>(),
                "base_vertices_checked": vertices,
                "violations": violations,
            });
            if *emit {
                payload["specs"] = serde_json::to_value(&specs)?;
            }
            Ok(Outcome::check(payload, violations == 0).diagnose("cover_error", errors))
        }
    }
}

fn maximal_payload(mc: &MaximalCover) -> Result<Value> {
    let rh = mc.cover().riemann_hurwitz(false)?;
    let locus = mc.cover().classify_branch_locus()?;
    let mut payload = serde_json::to_value(mc.summary())?;
    payload["tau_cycles"] = mc.tau().to_string().into();
    payload["sigma_cycles"] = mc.sigma().to_string().into();
    payload["genus_identity"] = (mc.genus() as u64 == mc.group().order() / 6 + 1).into();
    payload["riemann_hurwitz"] = serde_json::to_value(rh)?;
    payload["branch_locus"] = serde_json::to_value(locus)?;
    payload["graph"] = serde_json::to_value(mc.graph().to_json())?;
    Ok(payload)
}

fn maximal(ctx: &Context, cmd: &MaximalCmd) -> Result<Outcome> {
    match cmd {
        MaximalCmd::Build { group, pair, rho, dot } => {
            let g = ctx.group(&group.group)?;
            let (tau, sigma) = pick_pair(&g, pair)?;
            let mc = build_maximal(&g, &tau, &sigma)?;
            let mut payload = maximal_payload(&mc)?;
            let mut holds = payload["riemann_hurwitz"]["holds"] == true
                && payload["branch_locus"]["maximal"] == true
                && payload["genus_identity"] == true;
            if *rho {
                let cmp = compare_rho_variants(&mc)?;
                holds &= cmp.iter().all(|c| c.vertices == mc.graph().vertex_count());
                payload["rho_variants"] = serde_json::to_value(cmp)?;
            }
            let labels: BTreeMap<VertexId, String> = mc
                .vertex_labels()
                .iter()
                .enumerate()
                .map(|(i, p)| (VertexId(i as u32), format!("{p}<s>")))
                .collect();
            Ok(Outcome::check(payload, holds).with_file(dot.as_ref(), || mc.graph().to_dot("maximal", Some(&labels))))
        }
        MaximalCmd::Classify {
            genus,
            all,
            assume_complete,
        } => {
            let opts = ClassifyOptions {
                assume_complete: *assume_complete,
                all_pairs: *all,
            };
            let row = classify_genus(*genus, &ctx.catalog, &opts)?;
            let text = format_table(std::slice::from_ref(&row));
            Ok(Outcome::ok(serde_json::to_value(row)?).with_text(text))
        }
        MaximalCmd::Table { from, to, assume_complete } => {
            if from > to {
                return Err(Error::Unsupported(format!("empty genus range {from}..={to}")));
            }
            let opts = ClassifyOptions {
                assume_complete: *assume_complete,
                all_pairs: false,
            };
            let rows = classify_range(*from, *to, &ctx.catalog, &opts)?;
            let text = format_table(&rows);
            let table: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "genus": r.genus, "order": r.order, "groups": r.maximal_groups }))
                .collect();
            Ok(Outcome::ok(json!({ "table": table, "rows": rows, "text": text })).with_text(text))
        }
        MaximalCmd::Miller { family, n } => {
            let fam = match family {
                Family::Alt => MillerFamily::Alternating,
                Family::Sym => MillerFamily::Symmetric,
            };
            let generated = miller_check(fam, *n)?;
            Ok(Outcome::ok(json!({ "family": fam, "n": n, "generated": generated })))
        }
    }
}

fn surface(ctx: &Context, cmd: &SurfaceCmd) -> Result<Outcome> {
    match cmd {
        SurfaceCmd::Genus { oriented, dot } => {
            let og = read_json::<OrientedJson>(oriented)?.build()?;
            let report = og.surface_genus()?;
            let orbits = og.lht_decomposition().orbits;
            Ok(Outcome::ok(json!({
                "vertex_count": report.vertex_count,
                "L": report.l,
                "surface_genus": report.surface_genus,
                "orbit_lengths": orbits.iter().map(Vec::len).collect::<Vec<_>>(),
                "orbits": orbits,
            }))
            .with_file(dot.as_ref(), || og.to_dot("oriented")))
        }
        SurfaceCmd::Check44 { group, pair, all } => {
            let g = ctx.group(&group.group)?;
            if *all {
                let opts = PairSearchOptions {
                    product_order: pair.product_order,
                    all_involutions: false,
                };
                let pairs = search_23_pairs(&g, &opts)?.pairs;
                let reports = pairs
                    .par_iter()
                    .map(|p| surface_genus_check(&build_maximal(&g, &p.tau, &p.sigma)?))
                    .collect::<Result<Vec<_>>>()?;
                let violations = reports.iter().filter(|r| !r.holds || !r.identity_orbit_is_coset).count();
                return Ok(Outcome::check(
                    json!({ "group": g.name(), "pairs": reports.len(), "violations": violations, "reports": reports }),
                    violations == 0,
                ));
            }
            let (tau, sigma) = pick_pair(&g, pair)?;
            let mc = build_maximal(&g, &tau, &sigma)?;
            let report = surface_genus_check(&mc)?;
            let og = canonical_orientation(&mc)?;
            let holds = report.holds && report.identity_orbit_is_coset;
            let mut payload = serde_json::to_value(&report)?;
            payload["group"] = g.name().into();
            payload["tau"] = perm_json(&tau);
            payload["sigma"] = perm_json(&sigma);
            payload["vertices"] = mc.graph().vertex_count().into();
            payload["edges"] = mc.graph().edge_count().into();
            payload["graph_genus"] = mc.genus().into();
            payload["oriented"] = serde_json::to_value(og.to_json())?;
            Ok(Outcome::check(payload, holds))
        }
    }
}
