//! Message payloads and their bit accounting. The closed enumeration below is
//! everything any node program may put on a link; a payload's size is a 4-bit
//! tag plus the minimal binary width of each field, and must fit the per-round
//! bandwidth budget `bandwidth_factor * ceil(log2 n)`.

/// Items carried by the network-wide broadcast (upcast/downcast over the BFS
/// tree). Wrapped in [`Payload::Item`]; the item kind costs 3 extra bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BroadcastItem {
    /// Opaque token for tests and generic payload-free pipelining.
    Token(u64),
    CenterId(u32),
    /// Distance between two centers, indexed into the announced center list.
    CenterDist { a: u32, b: u32, value: u64 },
    /// A center pair with no estimate yet (still broadcast, so the message
    /// count is the same on every run).
    CenterUnknown { a: u32, b: u32 },
    SourceId(u32),
    /// A tracked source's distance to the just-elected bottleneck.
    BottleneckDist { src: u32, value: u64 },
    /// Node 0's bottleneck election result; `node` is an id or `n` for none.
    Decision { node: u64 },
    /// A verification counterexample: claimed row `src` is wrong at `node`.
    Witness { src: u32, node: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    /// Opaque token for tests.
    Token(u64),
    /// Unweighted BFS exploration wave (tree building).
    BfsExplore,
    /// "You are my parent" in the engine BFS tree.
    BfsChildClaim,
    /// Bellman-Ford style announcement of a decreased estimate.
    Relax { src: u32, value: u64 },
    /// One entry of a distance table, pipelined to neighbors.
    Table { src: u32, value: u64 },
    /// Rounded-weight BFS announcement, `units` counts multiples of 1/sigma.
    BfsUnits { src: u32, units: u64 },
    /// Sink-distance exchange before tree building.
    SinkDist { tree: u32, value: u64 },
    /// "I joined sink tree `tree`" attachment announcement.
    TreeAttach { tree: u32 },
    /// "You are my parent in sink tree `tree`".
    TreeChildClaim { tree: u32 },
    /// Convergecast of descendant counts in a sink tree.
    SubtreeCount { tree: u32, value: u64 },
    /// A source's distance record relayed up a sink tree.
    RelayRecord { tree: u32, src: u32, value: u64 },
    /// Convergecast minimum of bottleneck candidate ids (`n` for none).
    CandidateMin { node: u64 },
    Item(BroadcastItem),
}

const TAG_BITS: u32 = 4;
const ITEM_TAG_BITS: u32 = 3;

fn field(v: u64) -> u32 {
    (64 - v.leading_zeros()).max(1)
}

impl BroadcastItem {
    fn bits(&self) -> u32 {
        ITEM_TAG_BITS
            + match *self {
                BroadcastItem::Token(v) => field(v),
                BroadcastItem::CenterId(c) => field(c as u64),
                BroadcastItem::CenterDist { a, b, value } => {
                    field(a as u64) + field(b as u64) + field(value)
                }
                BroadcastItem::CenterUnknown { a, b } => field(a as u64) + field(b as u64),
                BroadcastItem::SourceId(s) => field(s as u64),
                BroadcastItem::BottleneckDist { src, value } => field(src as u64) + field(value),
                BroadcastItem::Decision { node } => field(node),
                BroadcastItem::Witness { src, node } => field(src as u64) + field(node as u64),
            }
    }
}

impl Payload {
    /// Serialized size in bits.
    pub fn bits(&self) -> u32 {
        TAG_BITS
            + match *self {
                Payload::Token(v) => field(v),
                Payload::BfsExplore | Payload::BfsChildClaim => 0,
                Payload::Relax { src, value } | Payload::Table { src, value } => {
                    field(src as u64) + field(value)
                }
                Payload::BfsUnits { src, units } => field(src as u64) + field(units),
                Payload::SinkDist { tree, value } | Payload::SubtreeCount { tree, value } => {
                    field(tree as u64) + field(value)
                }
                Payload::TreeAttach { tree } | Payload::TreeChildClaim { tree } => {
                    field(tree as u64)
                }
                Payload::RelayRecord { tree, src, value } => {
                    field(tree as u64) + field(src as u64) + field(value)
                }
                Payload::CandidateMin { node } => field(node),
                Payload::Item(item) => item.bits(),
            }
    }
}
