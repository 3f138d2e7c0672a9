"""Deterministic cycle engine.

Each cycle advances through a fixed phase order, which is part of the
external contract (changing it is a breaking change):

  1. masters       - react to responses, offer one transaction to their NIU
  2. initiator NIUs - serialize pending request packets, send one flit
  3. switches      - ingest arrivals, arbitrate, forward one flit per output
  4. target NIUs   - consume arrived requests, run them, send response flits
  5. response path - initiator NIUs reassemble responses and emit them to
                     the socket in release order

Identical (scenario, seed) pairs produce byte-identical traces: iteration
is in sorted id order everywhere, and workload randomness comes from
per-master generators seeded from the scenario seed alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import ScenarioError
from .fabric import ChannelStream, Switch, build_routing
from .niu import InitiatorNiu, TargetNiu
from .packet import PacketKind
from .scenario import (
    ExclusiveLoopProgram,
    LockLoopProgram,
    MasterSpec,
    RandomProgram,
    Scenario,
    ScriptProgram,
)
from .trace import (
    PKT_DELIVERED,
    PKT_INJECTED,
    REQ_ISSUED,
    RESP_EMITTED,
    STALL,
    MasterStats,
    Stats,
    Trace,
    TraceRecorder,
)
from .workload import (
    ExclusiveLoopMaster,
    LockLoopMaster,
    Master,
    ScriptedMaster,
    generate_random_steps,
)


@dataclass(slots=True)
class RunResult:
    memories: dict[int, bytes]
    trace: Trace
    stats: Stats
    timed_out: bool
    stuck: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.timed_out


def derive_rng(seed: int, master_id: int) -> random.Random:
    return random.Random(seed * 1_000_003 + master_id * 7_919 + 11)


def scripted_steps_for(spec: MasterSpec, seed: int):
    """Expand a master's program into explicit steps, if it is list-shaped.

    Kept separate from the engine so reference models can replay the exact
    same workload without running the fabric.
    """
    program = spec.program
    if isinstance(program, ScriptProgram):
        return program.steps
    if isinstance(program, RandomProgram):
        return generate_random_steps(
            master_id=spec.master_id,
            family=spec.niu.family,
            rng=derive_rng(seed, spec.master_id),
            transactions=program.transactions,
            op_mix=program.op_mix,
            address_ranges=program.address_ranges,
            burst_lens=program.burst_lens,
            beat_sizes=program.beat_sizes,
            threads=program.threads,
            txn_ids=program.txn_ids,
            max_bytes=program.max_bytes,
        )
    return None


class Engine:
    """Builds the runtime objects for one scenario and runs it to completion."""

    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.mode = scenario.run.mode
        self.recorder = TraceRecorder(scenario.run.trace_level)
        self.channels: dict[str, ChannelStream] = {}
        self.address_map = scenario.address_map()
        self.table = build_routing(scenario.topology, scenario.routing)

        self.switches: dict[int, Switch] = {
            s.switch_id: Switch(s.switch_id, s.ports, self.table)
            for s in scenario.topology.switches
        }
        self._switch_order = sorted(self.switches)

        self.initiators: dict[int, InitiatorNiu] = {}
        self.targets: dict[int, TargetNiu] = {}
        self.masters: dict[int, Master] = {}
        self.master_stats: dict[int, MasterStats] = {}
        self._build_nius()
        self._build_channels()
        self._build_masters()

    # -- construction ------------------------------------------------------------

    def _build_nius(self) -> None:
        for spec in self.scenario.masters:
            self.initiators[spec.niu.niu_id] = InitiatorNiu(spec.niu, self.address_map)
        for cfg in self.scenario.targets:
            tid = cfg.niu_id

            def monitor_event(cycle, kind, owner, actor, opcode, granule, _tid=tid):
                self.recorder.event(
                    cycle, f"niu{_tid}", kind,
                    master=owner, tag=actor, op=opcode.name, address=granule,
                )

            self.targets[tid] = TargetNiu(cfg, monitor_event)

    def _channel(self, name: str, params, depth: int, plane: PacketKind) -> ChannelStream:
        ch = ChannelStream(name, params, depth, plane)
        self.channels[name] = ch
        return ch

    def _build_channels(self) -> None:
        topo = self.scenario.topology
        for ln in topo.links:
            a, ap, b, bp = ln.a_switch, ln.a_port, ln.b_switch, ln.b_port
            for plane, tagname in ((PacketKind.REQUEST, "req"), (PacketKind.RESPONSE, "rsp")):
                fwd = self._channel(
                    f"sw{a}p{ap}-sw{b}p{bp}.{tagname}", ln.params, ln.buffer_depth, plane
                )
                self.switches[a].attach_output(plane, ap, fwd)
                self.switches[b].attach_input(plane, bp, fwd)
                rev = self._channel(
                    f"sw{b}p{bp}-sw{a}p{ap}.{tagname}", ln.params, ln.buffer_depth, plane
                )
                self.switches[b].attach_output(plane, bp, rev)
                self.switches[a].attach_input(plane, ap, rev)
        for at in topo.attachments:
            sw, port = at.switch_id, at.port
            if at.niu_id in self.initiators:
                niu = self.initiators[at.niu_id]
                tx = self._channel(
                    f"niu{at.niu_id}-sw{sw}p{port}.req", at.params, at.buffer_depth,
                    PacketKind.REQUEST,
                )
                niu.tx_req = tx
                self.switches[sw].attach_input(PacketKind.REQUEST, port, tx)
                rx = self._channel(
                    f"sw{sw}p{port}-niu{at.niu_id}.rsp", at.params, at.buffer_depth,
                    PacketKind.RESPONSE,
                )
                niu.rx_resp = rx
                self.switches[sw].attach_output(PacketKind.RESPONSE, port, rx)
            elif at.niu_id in self.targets:
                tgt = self.targets[at.niu_id]
                rx = self._channel(
                    f"sw{sw}p{port}-niu{at.niu_id}.req", at.params, at.buffer_depth,
                    PacketKind.REQUEST,
                )
                tgt.rx_req = rx
                self.switches[sw].attach_output(PacketKind.REQUEST, port, rx)
                tx = self._channel(
                    f"niu{at.niu_id}-sw{sw}p{port}.rsp", at.params, at.buffer_depth,
                    PacketKind.RESPONSE,
                )
                tgt.tx_resp = tx
                self.switches[sw].attach_input(PacketKind.RESPONSE, port, tx)
            else:
                raise ScenarioError(f"attachment references undeclared NIU {at.niu_id}")

    def _build_masters(self) -> None:
        seed = self.scenario.run.seed
        for spec in self.scenario.masters:
            mid = spec.master_id
            niu = self.initiators[mid]
            program = spec.program
            if isinstance(program, ExclusiveLoopProgram):
                master: Master = ExclusiveLoopMaster(
                    mid, niu, program.counter_address, program.iterations
                )
            elif isinstance(program, LockLoopProgram):
                master = LockLoopMaster(
                    mid, niu, program.counter_address, program.iterations
                )
            else:
                steps = scripted_steps_for(spec, seed)
                master = ScriptedMaster(mid, niu, steps)
            self.masters[mid] = master
            self.master_stats[mid] = MasterStats()
        self._master_order = sorted(self.masters)

    # -- run loop -----------------------------------------------------------------

    def _all_done(self) -> bool:
        return all(m.done() for m in self.masters.values()) and all(
            n.idle() for n in self.initiators.values()
        )

    def run(self) -> RunResult:
        rec = self.recorder
        fabric_cb = rec.fabric_callback()
        cycle = 0
        max_cycles = self.scenario.run.max_cycles
        while cycle < max_cycles:
            if self._all_done():
                break

            # phase 1: masters
            for mid in self._master_order:
                master = self.masters[mid]
                offer = master.offer()
                if offer is None:
                    continue
                request, wait = offer
                entry = master.niu.try_accept(request, cycle)
                if entry is None:
                    self.master_stats[mid].tag_stall_cycles += 1
                    if not master.stall_flagged:
                        master.stall_flagged = True
                        rec.event(
                            cycle, f"niu{mid}", STALL,
                            master=mid, key=request.order_key.short(),
                            op=request.opcode.name, address=request.address,
                        )
                    continue
                master.accepted(entry, wait)
                self.master_stats[mid].issued += 1
                rec.event(
                    cycle, f"niu{mid}", REQ_ISSUED,
                    master=mid, key=entry.order_key.short(), tag=entry.tag,
                    op=request.opcode.name, address=request.address,
                )

            # phase 2: initiator NIUs inject request flits
            for mid in self._master_order:
                packet = self.initiators[mid].step_inject(cycle)
                if packet is not None:
                    rec.packet_marker(
                        cycle, f"niu{mid}", PKT_INJECTED, packet.header_tuple()
                    )

            # phase 3: switches move flits
            for sid in self._switch_order:
                self.switches[sid].step(cycle, self.mode, fabric_cb)

            # phase 4: target NIUs execute requests and send response flits
            for tid in sorted(self.targets):
                handled = self.targets[tid].step(cycle)
                for pkt in handled:
                    rec.packet_marker(
                        cycle, f"niu{tid}", PKT_DELIVERED, pkt.header_tuple()
                    )

            # phase 5: response path back to the sockets
            for mid in self._master_order:
                master = self.masters[mid]
                emissions = self.initiators[mid].step_egress(cycle)
                for entry, response, visible in emissions:
                    if visible:
                        self.master_stats[mid].completed += 1
                        self.master_stats[mid].latencies.append(
                            cycle - entry.issue_cycle
                        )
                        rec.event(
                            cycle, f"niu{mid}", RESP_EMITTED,
                            master=mid, key=entry.order_key.short(), tag=entry.tag,
                            op=response.status.name, address=entry.request.address,
                        )
                    master.deliver(entry, response)

            cycle += 1

        timed_out = not self._all_done()
        stuck: list[str] = []
        if timed_out:
            stuck = self._stuck_report()
        stats = self._collect_stats(cycle, timed_out)
        return RunResult(
            memories={tid: bytes(t.memory) for tid, t in sorted(self.targets.items())},
            trace=rec.trace,
            stats=stats,
            timed_out=timed_out,
            stuck=stuck,
        )

    def _stuck_report(self) -> list[str]:
        stuck = []
        for mid in self._master_order:
            for entry in self.initiators[mid].pending.all_entries():
                stuck.append(
                    f"master {mid} tag {entry.tag} {entry.request.opcode.name}"
                    f"@{entry.request.address:#x} issued at cycle {entry.issue_cycle}"
                )
            master = self.masters[mid]
            if not master.done() and master.waiting_seq is None:
                offer = master.offer()
                if offer is not None:
                    req = offer[0]
                    stuck.append(
                        f"master {mid} blocked issuing {req.opcode.name}@{req.address:#x}"
                    )
        return stuck

    def _collect_stats(self, cycles: int, timed_out: bool) -> Stats:
        stats = Stats(
            cycles=cycles,
            mode=self.mode.name.lower(),
            seed=self.scenario.run.seed,
            timed_out=timed_out,
            masters=self.master_stats,
        )
        stats.completed_transactions = sum(
            ms.completed for ms in self.master_stats.values()
        )
        for name, ch in sorted(self.channels.items()):
            stats.channels[name] = {
                "flits": ch.flits_sent,
                "min_credits": ch.credits.min_seen,
                "depth": ch.credits.depth,
            }
        for sid in self._switch_order:
            sw = self.switches[sid]
            for plane in (PacketKind.REQUEST, PacketKind.RESPONSE):
                for port, out in sorted(sw.outputs[plane].items()):
                    site = sw.port_site(plane, port)
                    if plane is PacketKind.REQUEST and out.grants_by_input:
                        stats.switch_grants[site] = dict(
                            sorted(out.grants_by_input.items())
                        )
                    if out.lock_stall_cycles or out.credit_stall_cycles:
                        stats.port_stalls[site] = {
                            "lock": out.lock_stall_cycles,
                            "credit": out.credit_stall_cycles,
                        }
        return stats


def run(scenario: Scenario) -> RunResult:
    """Run one scenario to completion (or its cycle budget)."""
    return Engine(scenario).run()
