//! Wang-tile self-assembly with a built-in cumulative-XOR tile set.
//!
//! Tiles are unit squares with a glue label on each side; a placement is
//! valid when every side facing an occupied neighbor carries the same label
//! as the facing side. Grids are immutable: `attach` returns a new grid.
//!
//! The XOR set computes `y[i] = y[i-1] XOR x[i]` with 7 tiles over 5 labels:
//! one root anchor, two input tiles (x = 0, x = 1) that present the input
//! row, and four computation tiles, one per truth-table row, that read the
//! running parity on the west glue and the input bit on the south glue and
//! emit the new parity on the east and north glues. The initial parity
//! enters as a seed-role carrier tile at the left end of the computation
//! row, so input and output readouts cover exactly the input columns.
//!
//! Generic assembly grows a seeded configuration one tile at a time,
//! choosing uniformly at seeded random among valid attachments. A tile set
//! declares a cooperativity threshold: the number of matching occupied
//! neighbors an attachment needs. The XOR set requires 2, which makes
//! growth order-independent; with a threshold of 1 a computation tile
//! could attach ahead of its carry and guess the running parity.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Role annotation carried by a tile, used by readout.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    /// No role; pure structure.
    #[default]
    None,
    /// Seed/anchor tile.
    Root,
    /// Input bit presented to the computation.
    Input(u8),
    /// Output bit produced by the computation.
    Output(u8),
}

impl Tag {
    pub fn is_none(&self) -> bool {
        matches!(self, Tag::None)
    }

    fn bit(self) -> Option<bool> {
        match self {
            Tag::Input(b) | Tag::Output(b) => Some(b != 0),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TagRepr {
    Root,
    Input(u8),
    Output(u8),
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            Tag::None => return serializer.serialize_none(),
            Tag::Root => TagRepr::Root,
            Tag::Input(b) => TagRepr::Input(b),
            Tag::Output(b) => TagRepr::Output(b),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Tag, D::Error> {
        let repr = Option::<TagRepr>::deserialize(deserializer)?;
        Ok(match repr {
            None => Tag::None,
            Some(TagRepr::Root) => Tag::Root,
            Some(TagRepr::Input(b)) if b <= 1 => Tag::Input(b),
            Some(TagRepr::Output(b)) if b <= 1 => Tag::Output(b),
            Some(_) => return Err(D::Error::custom("tag bit must be 0 or 1")),
        })
    }
}

/// A unit square with one glue label per side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WangTile {
    pub n: String,
    pub e: String,
    pub s: String,
    pub w: String,
    #[serde(default, skip_serializing_if = "Tag::is_none")]
    pub tag: Tag,
}

impl WangTile {
    pub fn new(n: &str, e: &str, s: &str, w: &str, tag: Tag) -> WangTile {
        WangTile {
            n: n.to_string(),
            e: e.to_string(),
            s: s.to_string(),
            w: w.to_string(),
            tag,
        }
    }

    fn side(&self, side: Side) -> &str {
        match side {
            Side::North => &self.n,
            Side::East => &self.e,
            Side::South => &self.s,
            Side::West => &self.w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::East => Side::West,
            Side::South => Side::North,
            Side::West => Side::East,
        }
    }

    /// (row, col) offset toward this side; rows grow upward.
    fn offset(self) -> (i64, i64) {
        match self {
            Side::North => (1, 0),
            Side::East => (0, 1),
            Side::South => (-1, 0),
            Side::West => (0, -1),
        }
    }

    const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::North => "north",
            Side::East => "east",
            Side::South => "south",
            Side::West => "west",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TilingError {
    #[error("position ({row}, {col}) is already occupied")]
    Occupied { row: i64, col: i64 },
    #[error(
        "glue mismatch on the {side} side at ({row}, {col}): \
         tile presents {tile_glue:?}, neighbor presents {neighbor_glue:?}"
    )]
    GlueMismatch {
        row: i64,
        col: i64,
        side: Side,
        tile_glue: String,
        neighbor_glue: String,
    },
    #[error("tile uses glue {glue:?} which is not in the palette")]
    UnknownGlue { glue: String },
    #[error("cooperativity threshold must be at least 1")]
    BadCooperativity,
    #[error("no tiles tagged with the requested readout role")]
    EmptyReadout,
}

/// A partial tiling of the integer plane. Rows grow upward, columns grow
/// rightward. Every adjacent pair of tiles agrees on the shared edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssemblyGrid {
    cells: BTreeMap<(i64, i64), WangTile>,
}

impl AssemblyGrid {
    pub fn new() -> AssemblyGrid {
        AssemblyGrid::default()
    }

    /// Builds a grid from placements, validating occupancy and adjacency.
    pub fn from_placements(
        placements: &[((i64, i64), WangTile)],
    ) -> Result<AssemblyGrid, TilingError> {
        let mut grid = AssemblyGrid::new();
        for ((row, col), tile) in placements {
            grid = grid.attach((*row, *col), tile.clone())?;
        }
        Ok(grid)
    }

    pub fn get(&self, pos: (i64, i64)) -> Option<&WangTile> {
        self.cells.get(&pos)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &WangTile)> {
        self.cells.iter().map(|(&p, t)| (p, t))
    }

    /// Places `tile` at `pos`, returning the extended grid. Fails if the
    /// position is occupied or any facing glue disagrees, naming the side.
    pub fn attach(&self, pos: (i64, i64), tile: WangTile) -> Result<AssemblyGrid, TilingError> {
        let (row, col) = pos;
        if self.cells.contains_key(&pos) {
            return Err(TilingError::Occupied { row, col });
        }
        for side in Side::ALL {
            let (dr, dc) = side.offset();
            if let Some(neighbor) = self.cells.get(&(row + dr, col + dc)) {
                let mine = tile.side(side);
                let theirs = neighbor.side(side.opposite());
                if mine != theirs {
                    return Err(TilingError::GlueMismatch {
                        row,
                        col,
                        side,
                        tile_glue: mine.to_string(),
                        neighbor_glue: theirs.to_string(),
                    });
                }
            }
        }
        let mut next = self.clone();
        next.cells.insert(pos, tile);
        Ok(next)
    }

    /// Occupied neighbors of `pos` that match `tile` on the facing glue.
    /// Returns None if any occupied neighbor disagrees.
    fn matching_contacts(&self, pos: (i64, i64), tile: &WangTile) -> Option<u32> {
        let mut contacts = 0;
        for side in Side::ALL {
            let (dr, dc) = side.offset();
            if let Some(neighbor) = self.cells.get(&(pos.0 + dr, pos.1 + dc)) {
                if tile.side(side) != neighbor.side(side.opposite()) {
                    return None;
                }
                contacts += 1;
            }
        }
        Some(contacts)
    }
}

/// A finite tile inventory over a glue palette.
///
/// `cooperativity` is the number of matching occupied neighbors a generic
/// attachment needs; 1 admits any single contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileSet {
    pub palette: Vec<String>,
    pub tiles: Vec<WangTile>,
    #[serde(default = "default_cooperativity")]
    pub cooperativity: u32,
}

fn default_cooperativity() -> u32 {
    1
}

impl TileSet {
    /// Checks that every tile draws its glues from the palette and the
    /// cooperativity threshold is positive.
    pub fn validate(&self) -> Result<(), TilingError> {
        if self.cooperativity < 1 {
            return Err(TilingError::BadCooperativity);
        }
        for tile in &self.tiles {
            for side in Side::ALL {
                let glue = tile.side(side);
                if !self.palette.iter().any(|p| p == glue) {
                    return Err(TilingError::UnknownGlue {
                        glue: glue.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

const GLUE_SEED: &str = "seed";

fn x_glue(bit: bool) -> &'static str {
    if bit {
        "x1"
    } else {
        "x0"
    }
}

fn y_glue(bit: bool) -> &'static str {
    if bit {
        "y1"
    } else {
        "y0"
    }
}

/// The root anchor at the bottom-left corner.
fn root_tile() -> WangTile {
    WangTile::new(x_glue(false), GLUE_SEED, GLUE_SEED, GLUE_SEED, Tag::Root)
}

/// Input tile presenting bit `b` on its north glue.
fn input_tile(b: bool) -> WangTile {
    WangTile::new(
        x_glue(b),
        GLUE_SEED,
        x_glue(b),
        GLUE_SEED,
        Tag::Input(b as u8),
    )
}

/// Computation tile for carry-in `w` and input `s`; the result w XOR s
/// rides the east and north glues.
fn compute_tile(w: bool, s: bool) -> WangTile {
    let r = w != s;
    WangTile::new(
        y_glue(r),
        y_glue(r),
        x_glue(s),
        y_glue(w),
        Tag::Output(r as u8),
    )
}

/// Initial-parity carrier: the glue geometry of the compute tile whose
/// result equals `y0`, in the seed role so readouts skip it.
fn carrier_tile(y0: bool) -> WangTile {
    WangTile {
        tag: Tag::Root,
        ..compute_tile(y0, false)
    }
}

/// The built-in cumulative-XOR tile set: 7 tiles over 5 glue labels,
/// cooperativity 2.
pub fn xor_tile_set() -> TileSet {
    TileSet {
        palette: vec![
            GLUE_SEED.to_string(),
            "x0".to_string(),
            "x1".to_string(),
            "y0".to_string(),
            "y1".to_string(),
        ],
        tiles: vec![
            root_tile(),
            input_tile(false),
            input_tile(true),
            compute_tile(false, false),
            compute_tile(false, true),
            compute_tile(true, false),
            compute_tile(true, true),
        ],
        cooperativity: 2,
    }
}

/// Seed configuration for a cumulative-XOR run: root at the origin, the
/// initial-parity carrier above it, and the input row to its right.
pub fn xor_seed(x: &[bool], y0: bool) -> Vec<((i64, i64), WangTile)> {
    let mut placements = vec![((0, 0), root_tile()), ((1, 0), carrier_tile(y0))];
    for (j, &bit) in x.iter().enumerate() {
        placements.push(((0, j as i64 + 1), input_tile(bit)));
    }
    placements
}

/// Runs the cumulative XOR `y[i] = y[i-1] XOR x[i]` with `y[0] = y0` by direct
/// row construction, returning the output bits and the finished grid.
pub fn run_xor(x: &[bool], y0: bool) -> (Vec<bool>, AssemblyGrid) {
    let mut grid = AssemblyGrid::from_placements(&xor_seed(x, y0))
        .expect("seed configuration is self-consistent");
    let mut carry = y0;
    let mut y = Vec::with_capacity(x.len());
    for (j, &bit) in x.iter().enumerate() {
        let tile = compute_tile(carry, bit);
        grid = grid
            .attach((1, j as i64 + 1), tile)
            .expect("computation row follows the carry chain");
        carry = carry != bit;
        y.push(carry);
    }
    (y, grid)
}

/// The four single-step XOR rows: ((carry, x), result).
pub fn xor_truth_table() -> Vec<((bool, bool), bool)> {
    let mut rows = Vec::with_capacity(4);
    for &carry in &[false, true] {
        for &x in &[false, true] {
            let (y, _) = run_xor(&[x], carry);
            rows.push(((carry, x), y[0]));
        }
    }
    rows
}

/// Result of a generic assembly run.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyRun {
    pub grid: AssemblyGrid,
    /// Attachments actually performed.
    pub attachments: u64,
    /// True when the run stopped because no valid attachment remained
    /// (quiescence or deadlock), rather than by exhausting the step budget.
    pub stuck: bool,
}

/// Grows `seed_placements` with tiles from `ts`, one seeded-random valid
/// attachment at a time, for up to `steps` attachments.
///
/// A candidate is any (empty position, tile) pair adjacent to the assembly
/// whose facing glues all match and whose matching-contact count reaches
/// the tile set's cooperativity threshold. Identical seeds reproduce runs
/// exactly.
pub fn assemble_generic(
    ts: &TileSet,
    seed_placements: &[((i64, i64), WangTile)],
    steps: u64,
    seed: u64,
) -> Result<AssemblyRun, TilingError> {
    ts.validate()?;
    for (_, tile) in seed_placements {
        for side in Side::ALL {
            let glue = tile.side(side);
            if !ts.palette.iter().any(|p| p == glue) {
                return Err(TilingError::UnknownGlue {
                    glue: glue.to_string(),
                });
            }
        }
    }
    let mut grid = AssemblyGrid::from_placements(seed_placements)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attachments = 0;
    let mut stuck = false;
    while attachments < steps {
        let candidates = enumerate_attachments(ts, &grid);
        if candidates.is_empty() {
            stuck = true;
            break;
        }
        let (pos, tile_idx) = candidates[rng.gen_range(0..candidates.len())];
        grid = grid.attach(pos, ts.tiles[tile_idx].clone())?;
        attachments += 1;
    }
    Ok(AssemblyRun {
        grid,
        attachments,
        stuck,
    })
}

/// Valid (position, tile index) attachments in deterministic order.
fn enumerate_attachments(ts: &TileSet, grid: &AssemblyGrid) -> Vec<((i64, i64), usize)> {
    let mut frontier = BTreeMap::new();
    for ((row, col), _) in grid.iter() {
        for side in Side::ALL {
            let (dr, dc) = side.offset();
            let pos = (row + dr, col + dc);
            if grid.get(pos).is_none() {
                frontier.insert(pos, ());
            }
        }
    }
    let mut candidates = Vec::new();
    for &pos in frontier.keys() {
        for (idx, tile) in ts.tiles.iter().enumerate() {
            if let Some(contacts) = grid.matching_contacts(pos, tile) {
                if contacts >= ts.cooperativity {
                    candidates.push((pos, idx));
                }
            }
        }
    }
    candidates
}

/// Which tagged tiles a readout collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutRole {
    Input,
    Output,
}

/// Bits of the role's tiles in column order (ties broken by row).
///
/// Fails when the grid holds no tile of that role.
pub fn readout(grid: &AssemblyGrid, role: ReadoutRole) -> Result<Vec<bool>, TilingError> {
    let mut hits: Vec<((i64, i64), bool)> = grid
        .iter()
        .filter_map(|((row, col), tile)| {
            let keep = matches!(
                (role, tile.tag),
                (ReadoutRole::Input, Tag::Input(_)) | (ReadoutRole::Output, Tag::Output(_))
            );
            keep.then(|| ((col, row), tile.tag.bit().unwrap()))
        })
        .collect();
    if hits.is_empty() {
        return Err(TilingError::EmptyReadout);
    }
    hits.sort();
    Ok(hits.into_iter().map(|(_, bit)| bit).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Oracle: prefix XOR by direct fold.
    pub fn prefix_xor(x: &[bool], y0: bool) -> Vec<bool> {
        x.iter()
            .scan(y0, |carry, &bit| {
                *carry = *carry != bit;
                Some(*carry)
            })
            .collect()
    }

    /// Independent full-grid adjacency validation.
    fn adjacency_holds(grid: &AssemblyGrid) -> bool {
        grid.iter().all(|((row, col), tile)| {
            let east_ok = grid
                .get((row, col + 1))
                .is_none_or(|right| tile.e == right.w);
            let north_ok = grid
                .get((row + 1, col))
                .is_none_or(|above| tile.n == above.s);
            east_ok && north_ok
        })
    }

    #[test]
    fn xor_set_has_seven_tiles_over_five_labels() {
        let ts = xor_tile_set();
        assert_eq!(ts.tiles.len(), 7);
        assert_eq!(ts.palette.len(), 5);
        ts.validate().unwrap();
        let used: BTreeSet<&str> = ts
            .tiles
            .iter()
            .flat_map(|t| [t.n.as_str(), t.e.as_str(), t.s.as_str(), t.w.as_str()])
            .collect();
        assert_eq!(used.len(), 5);
        let distinct: BTreeSet<_> = ts.tiles.iter().collect();
        assert_eq!(distinct.len(), 7);
    }

    #[test]
    fn attach_rejects_occupied_position() {
        let grid = AssemblyGrid::new().attach((0, 0), root_tile()).unwrap();
        assert_eq!(
            grid.attach((0, 0), input_tile(false)).unwrap_err(),
            TilingError::Occupied { row: 0, col: 0 }
        );
    }

    #[test]
    fn attach_names_the_mismatching_side() {
        let grid = AssemblyGrid::new().attach((0, 0), root_tile()).unwrap();
        let err = grid.attach((0, 1), compute_tile(false, false)).unwrap_err();
        assert_eq!(
            err,
            TilingError::GlueMismatch {
                row: 0,
                col: 1,
                side: Side::West,
                tile_glue: "y0".to_string(),
                neighbor_glue: "seed".to_string(),
            }
        );
        assert!(err.to_string().contains("west"));
    }

    #[test]
    fn single_bit_xor_matches_figure() {
        let (y, _) = run_xor(&[true], true);
        assert_eq!(y, vec![false]);
    }

    #[test]
    fn two_bit_xor_readout() {
        let (y, grid) = run_xor(&[true, false], true);
        assert_eq!(y, vec![false, false]);
        assert_eq!(
            readout(&grid, ReadoutRole::Output).unwrap(),
            vec![false, false]
        );
        assert_eq!(
            readout(&grid, ReadoutRole::Input).unwrap(),
            vec![true, false]
        );
    }

    #[test]
    fn truth_table_rows() {
        assert_eq!(
            xor_truth_table(),
            vec![
                ((false, false), false),
                ((false, true), true),
                ((true, false), true),
                ((true, true), false),
            ]
        );
    }

    #[test]
    fn readout_requires_tagged_tiles() {
        let grid = AssemblyGrid::new().attach((0, 0), root_tile()).unwrap();
        assert_eq!(
            readout(&grid, ReadoutRole::Output).unwrap_err(),
            TilingError::EmptyReadout
        );
    }

    #[test]
    fn generic_assembly_reproduces_direct_xor() {
        let x = [true, false, true, true, false];
        for seed in 0..5u64 {
            let run = assemble_generic(&xor_tile_set(), &xor_seed(&x, true), 100, seed).unwrap();
            assert!(run.stuck, "quiescence expected once the row completes");
            assert_eq!(run.attachments, x.len() as u64);
            let want = run_xor(&x, true).0;
            assert_eq!(readout(&run.grid, ReadoutRole::Output).unwrap(), want);
            assert_eq!(readout(&run.grid, ReadoutRole::Input).unwrap(), x.to_vec());
        }
    }

    #[test]
    fn generic_assembly_is_seed_deterministic() {
        let x = [true, true, false];
        let a = assemble_generic(&xor_tile_set(), &xor_seed(&x, false), 50, 9).unwrap();
        let b = assemble_generic(&xor_tile_set(), &xor_seed(&x, false), 50, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deadlocked_assembly_is_flagged_stuck() {
        let seed = [((0, 0), root_tile())];
        let run = assemble_generic(&xor_tile_set(), &seed, 10, 0).unwrap();
        assert!(run.stuck);
        assert_eq!(run.attachments, 0);
        assert_eq!(run.grid.len(), 1);
    }

    #[test]
    fn tile_set_json_round_trip_and_palette_check() {
        let ts = xor_tile_set();
        let json = serde_json::to_string(&ts).unwrap();
        let back: TileSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ts);

        let bad: TileSet = serde_json::from_str(
            r#"{"palette":["a"],"tiles":[{"n":"a","e":"a","s":"a","w":"zzz"}]}"#,
        )
        .unwrap();
        assert_eq!(bad.cooperativity, 1);
        assert_eq!(
            bad.validate().unwrap_err(),
            TilingError::UnknownGlue {
                glue: "zzz".to_string()
            }
        );
    }

    proptest! {
        #[test]
        fn xor_matches_prefix_fold(
            x in proptest::collection::vec(any::<bool>(), 0..12),
            y0 in any::<bool>(),
        ) {
            let (y, grid) = run_xor(&x, y0);
            prop_assert_eq!(&y, &prefix_xor(&x, y0));
            prop_assert!(adjacency_holds(&grid));
            if !x.is_empty() {
                prop_assert_eq!(readout(&grid, ReadoutRole::Output).unwrap(), y);
                prop_assert_eq!(readout(&grid, ReadoutRole::Input).unwrap(), x);
            }
        }

        #[test]
        fn generic_assembly_grids_stay_consistent(
            x in proptest::collection::vec(any::<bool>(), 1..8),
            y0 in any::<bool>(),
            seed in 0u64..16,
        ) {
            let run = assemble_generic(&xor_tile_set(), &xor_seed(&x, y0), 64, seed)
                .unwrap();
            prop_assert!(adjacency_holds(&run.grid));
            prop_assert_eq!(
                readout(&run.grid, ReadoutRole::Output).unwrap(),
                prefix_xor(&x, y0)
            );
        }
    }
}
