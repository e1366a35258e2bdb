#!/usr/bin/env python3
"""Generate the two scenario fixture trees under fixtures/."""
import json
import os

ROOT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")
UK = os.path.join(ROOT, "uk_office")
BANK = os.path.join(ROOT, "bank")

GW = "intergalactic-vpn-gw"
ALPINE = "alpine-openvpn-1"
HACKER = "intergalactic-hacker"
WEBUI = "intergalactic-web-ui"


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(text)


def write_json(path, obj):
    write(path, json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------- UK topology
def uk_topology():
    nodes = [
        {"id": HACKER, "class": "external"},
        {"id": "cloud", "class": "cloud"},
        {"id": "fw1", "class": "firewall"},
        {"id": "l3sw", "class": "router"},
        {"id": GW, "class": "gateway", "os": "linux"},
        {"id": "vpnSW", "class": "switch"},
        {"id": "apCtrl", "class": "controller"},
        {"id": "fle4n", "class": "ap"},
        {"id": ALPINE, "class": "container", "os": "linux"},
        {"id": "dns1", "class": "dns"},
    ]
    fillers = [f"ws{i:02d}" for i in range(1, 45)]
    nodes += [{"id": w, "class": "workstation"} for w in fillers]
    assert len(nodes) == 54

    links = [
        {"a": HACKER, "b": "cloud"},
        {"a": "cloud", "b": "fw1"},
        {"a": "fw1", "b": "l3sw"},
        {"a": "l3sw", "b": GW},
        {"a": GW, "b": "vpnSW"},
        {"a": "vpnSW", "b": "apCtrl"},
        {"a": "apCtrl", "b": "fle4n"},
        {"a": "fle4n", "b": ALPINE},
        {"a": "vpnSW", "b": "dns1"},
    ]
    links += [{"a": w, "b": "l3sw"} for w in fillers]
    assert len(links) == 53

    addr = {
        HACKER: "198.51.100.66",
        "cloud": "203.0.113.1",
        "fw1": "203.0.113.2",
        "l3sw": "10.0.0.1",
        GW: "203.0.113.10",
        "vpnSW": "10.8.0.1",
        "apCtrl": "10.8.0.2",
        "fle4n": "10.8.0.3",
        ALPINE: "10.8.10.2",
        "dns1": "10.8.10.3",
    }
    interfaces = [
        {"node": n["id"], "name": "eth0",
         "address": addr.get(n["id"], f"10.0.1.{i + 1}")}
        for i, n in enumerate(nodes)
    ]
    assert len(interfaces) == 54

    software = [
        {"node": GW, "software": WEBUI, "version": "2.4.12"},
        {"node": GW, "software": WEBUI, "version": "0.1.0rc0"},
    ] + [{"node": f"ws{i:02d}", "software": "libreoffice", "version": "7.2"}
         for i in range(1, 11)]
    assert len(software) == 12

    services = [
        {"node": GW, "software": WEBUI, "protocol": "udp", "port": "1194",
         "account": "root"},
        {"node": GW, "software": WEBUI, "protocol": "http", "port": "80",
         "account": "root"},
    ] + [{"node": f"ws{i:02d}", "software": "cups", "protocol": "ipp",
          "port": "631", "account": "lp"} for i in range(1, 7)]
    assert len(services) == 8

    acls = [
        {"src": ALPINE, "dst": GW, "protocol": "udp", "port": "1194"},
        {"src": HACKER, "dst": GW, "protocol": "http", "port": "80"},
        {"src": HACKER, "dst": GW, "protocol": "udp", "port": "1194"},
        {"src": "ws01", "dst": "ws02", "protocol": "tcp", "port": "445"},
        {"src": "ws03", "dst": "ws04", "protocol": "tcp", "port": "3389"},
        {"src": "ws05", "dst": "ws06", "protocol": "tcp", "port": "22"},
    ]

    subnets = [
        {"name": "vpn", "vlan": 10, "members": [ALPINE, "dns1"],
         "virtual_ports": ["vp-alpine", "vp-dns1", "vp-gw"]},
        {"name": "perimeter", "vlan": 20, "members": [GW], "virtual_ports": []},
        {"name": "office", "members": [f"ws{i:02d}" for i in range(1, 6)],
         "virtual_ports": []},
    ]
    bindings = [
        {"flow": "f-vpn-profiles", "src_host": ALPINE, "path": "/etc/openvpn"},
        {"flow": "f-dns-zone", "src_host": "dns1", "path": "/var/dns"},
    ]
    facts = (len(interfaces) + len(links) + len(software) + len(services)
             + len(acls) + sum(len(s["members"]) for s in subnets)
             + sum(len(s["virtual_ports"]) for s in subnets) + len(bindings))
    assert facts == 146, facts
    return {"nodes": nodes, "interfaces": interfaces, "links": links,
            "software": software, "services": services, "acls": acls,
            "subnets": subnets, "bindings": bindings}


def uk_assumptions():
    lines = [
        f"hasAccess(alice,'{ALPINE}','{GW}',udp,'1194').",
        f"hasAccess('{HACKER}','{HACKER}','{GW}',http,'80').",
        f"hasAccess('{HACKER}','{HACKER}','{GW}',udp,'1194').",
        f"hasAccount(root,'{GW}','operating-system-administration-account').",
        f"malicious('{HACKER}').",
    ]
    zones = ["office", "lab", "guest"]
    lines += [f"inZone(u{i:02d},{zones[i % 3]})." for i in range(1, 7)]                 # 6
    lines += [f"phishingDelivered(mallory,ws{i:02d})." for i in range(1, 7)]            # 6
    lines += [f"userInteraction(ws{i:02d},open_attachment)." for i in range(1, 9)]      # 8
    lines += [f"weakPassword(ws{i:02d},local_admin)." for i in range(7, 17)]            # 10
    lines += [f"passwordPolicy(ws{i:02d},disabled)." for i in range(7, 11)]             # 4
    lines += [f"mfaEnabled(ws{i:02d},local_admin,push)." for i in range(1, 7)]          # 6
    lines += [f"certificateAuthorityTrusted(ws{i:02d},office_ca)." for i in range(1, 4)]  # 3
    lines += [f"credential('{GW}',vault_path,'/etc/openvpn/vpn-users.db')."]
    lines += [f"credential(ws{i:02d},vault_path,'/home/user/.vault')." for i in range(1, 8)]  # 8 total
    lines += [f"dnsResolvable(ws{i:02d},'corp.example')." for i in range(1, 13)]        # 12
    lines += [f"wirelessCoverage(fle4n,ws{i:02d})." for i in range(20, 27)]             # 7
    lines += [f"deviceOnline(ws{i:02d},'Linux')." for i in range(7, 19)]                # 12
    lines += [f"patchLevel(ws{i:02d},cups,outdated)." for i in range(1, 11)]            # 10
    lines += [f"loggingEnabled(ws{i:02d},syslog)." for i in range(1, 9)]                # 8
    lines += [f"backupConfigured(ws{i:02d},nightly)." for i in range(1, 8)]             # 7
    assert len(lines) == 112, len(lines)
    return "\n".join(lines) + "\n"


UK_RULES = {
    "r01_attacker_location.pl": """\
% RULE 1 (Attacker located in zone.)
attackerInZone(P,Z) :- malicious(P), inZone(P,Z).
""",
    "r02_subnet_membership.pl": """\
% RULE 2 (Subnet membership.)
inSubnet(H,S) :- isInSubnet(S,H).
""",
    "r03_phishing.pl": """\
% RULE 3 (Phishing delivery with user interaction.)
phishingFoothold(P,H) :- phishingDelivered(P,H), userInteraction(H,U).
""",
    "r04_password_guessing.pl": """\
% RULE 4 (Password guessing against weak accounts.)
guessedPassword(H,A) :- weakPassword(H,A), passwordPolicy(H,disabled).
""",
    "r05_net_direct_access.pl": """\
% RULE 5 (Net direct access.)
netAccess(P,H1,H2,Proto,Port) :- hasAccess(P,H1,H2,Proto,Port), hacl(H1,H2,Proto,Port).
""",
    "r06_mfa_bypass.pl": """\
% RULE 6 (MFA fatigue bypass.)
mfaBypassed(H,A) :- mfaEnabled(H,A,push), userInteraction(H,approve_prompt).
""",
    "r07_dns_poisoning.pl": """\
% RULE 7 (DNS cache poisoning.)
dnsPoisoned(H,D) :- dnsResolvable(H,D), deviceOnline(H,OS).
""",
    "r08_rogue_ap.pl": """\
% RULE 8 (Rogue access point association.)
rogueAssociation(H,AP) :- wirelessCoverage(AP,H), deviceOnline(H,OS).
""",
    "r09_unpatched_service.pl": """\
% RULE 9 (Unpatched network service exposure.)
unpatchedExposure(H,SW) :- networkService(H,SW,Proto,Port,A), patchLevel(H,SW,outdated).
""",
    "r10_log_evasion.pl": """\
% RULE 10 (Defense evasion by disabling logs.)
logTampering(P,H) :- malicious(P), loggingEnabled(H,syslog), credential(H,K,V).
""",
    "r11_backup_collection.pl": """\
% RULE 11 (Collection from configured backups.)
backupTheft(P,H) :- malicious(P), backupConfigured(H,T), dataBind(F,H,Path).
""",
    "r12_subnet_sweep.pl": """\
% RULE 12 (Subnet discovery sweep.)
subnetMapped(P,S) :- malicious(P), isInSubnet(S,H), dnsResolvable(H,D).
""",
    "r13_credential_stores.pl": """\
% RULE 13 (Credentials from password stores.)
credentialHarvest(H,K) :- credential(H,K,V), weakPassword(H,A).
""",
    "r14_lateral_smb.pl": """\
% RULE 14 (Lateral movement over SMB.)
lateralMovementSMB(P,H1,H2) :- malicious(P), hacl(H1,H2,tcp,'445'), deviceOnline(H2,OS).
""",
    "r15_host_compromised.pl": """\
% RULE 15 (Host compromised.)
compromisedVPNClient(H1,GW) :- softwareCompromisedRemotely(H1,GW).
""",
    "r16_exfiltration.pl": """\
% RULE 16 (Exfiltration over alternative protocol.)
exfilChannel(P,H) :- malicious(P), dnsResolvable(H,D), backupConfigured(H,T).
""",
    "r18_remote_software_compromise.pl": """\
% RULE 18 (Remote software compromise.)
softwareCompromisedRemotely(H1,GW) :- netAccess(P,H1,GW,Proto,Port), networkService(GW,SW,Proto,Port,root), vulExists(V,SW,Ver,AV,LT,Sev), residesOn(GW,SW,Ver).
""",
    "r19_local_privilege_escalation.pl": """\
% RULE 19 (Local privilege escalation.)
softwareCompromisedLocally(GW) :- compromisedVPNClient(C,GW), vulExists(V,SW,Ver,AV,LT,Sev), residesOn(GW,SW,Ver), hasAccount(root,GW,A).
""",
    "r20_forge_certificate.pl": """\
% RULE 20 (Forge VPN certificate.)
forgedVPNCertificate(P,GW) :- malicious(P), certificateAuthorityTrusted(GW,CA), credential(GW,K,V).
""",
    "r21_vpn_network_access.pl": """\
% RULE 21 (VPN network access.)
canAccessVPN(P,GW) :- malicious(P), softwareCompromisedLocally(GW).
""",
    "r22_lateral_movement_vpn.pl": f"""\
% RULE 22 (Lateral movement over VPN network.)
lateralMovementVPN(P,GW,H) :- canAccessVPN(P,GW), compromisedVPNClient(H,GW), inSubnet(H,vpn).
attackGoal(lateralMovementVPN('{HACKER}','{GW}','{ALPINE}')).
""",
}

UK_VULNS = """\
cve_id,software,version,access_vector,lose_types,severity
cve-2023-27524,intergalactic-web-ui,2.4.12,network,codeExecution,critical
cve-zero-day-web-ui-execute,intergalactic-web-ui,0.1.0rc0,network,codeExecution,critical
"""

UK_TECHNIQUES = """\
T1016
T1505.003
T1555
T1110.002
T1133
T1423
T1021.004
T1021.004
"""

UK_MAP_IRS = """\
technique_id,ir_file
T1016,r02_subnet_membership.pl
T1016,r12_subnet_sweep.pl
T1016,r07_dns_poisoning.pl
T1505.003,r18_remote_software_compromise.pl
T1505.003,r09_unpatched_service.pl
T1505.003,r03_phishing.pl
T1555,r13_credential_stores.pl
T1555,r04_password_guessing.pl
T1555,r10_log_evasion.pl
T1110.002,r19_local_privilege_escalation.pl
T1110.002,r06_mfa_bypass.pl
T1133,r21_vpn_network_access.pl
T1133,r05_net_direct_access.pl
T1133,r20_forge_certificate.pl
T1133,r01_attacker_location.pl
T1423,r08_rogue_ap.pl
T1423,r11_backup_collection.pl
T1423,r16_exfiltration.pl
T1021.004,r22_lateral_movement_vpn.pl
T1021.004,r15_host_compromised.pl
T1021.004,r14_lateral_smb.pl
"""

UK_MAP_ABILITIES = """\
technique_id,ability_number
T1016,uk-aaaa-01
T1505.003,uk-aaaa-02
T1555,uk-aaaa-03
T1110.002,uk-aaaa-04
T1133,uk-aaaa-05
T1423,uk-aaaa-06
T1021.004,uk-aaaa-07
T1548.002,e3db134c-4aed-4c5a-9607-c50183c9ef9e
"""

UK_ABILITIES = """\
- name: Web UI version discovery
  ability_number: uk-aaaa-01
  technique: T1016
  technique_name: System Network Configuration Discovery
  description: Read the VPN gateway web UI version endpoint.
  type: exploit
  tags: [discovery]
  platform: linux
  executor: sh
  command: "curl -s http://#{host.ip}/api/v1/version"
- name: Web UI remote command execution
  ability_number: uk-aaaa-02
  technique: T1505.003
  technique_name: Server Software Component - Web Shell
  description: Drive the vulnerable execute endpoint of the gateway web UI.
  type: exploit
  tags: [initial-access]
  platform: linux
  executor: sh
  command: "curl -s -X POST http://#{host.ip}/api/v1/execute -d 'cmd=id'"
- name: VPN credential store dump
  ability_number: uk-aaaa-03
  technique: T1555
  technique_name: Credentials from Password Stores
  description: Dump the OpenVPN user database found on the gateway.
  type: exploit
  tags: [credential-access]
  platform: linux
  executor: sh
  command: "sqlite3 #{cred.vault_path} 'SELECT username,password FROM users;'"
- name: Offline password cracking
  ability_number: uk-aaaa-04
  technique: T1110.002
  technique_name: Brute Force - Password Cracking
  description: Crack the dumped password hashes offline.
  type: exploit
  tags: [credential-access]
  platform: linux
  executor: sh
  command: "john --format=sha512crypt --wordlist=wordlist.txt dumped-hashes.txt"
- name: Join VPN with forged client profile
  ability_number: uk-aaaa-05
  technique: T1133
  technique_name: External Remote Services
  description: Establish a VPN session with a forged client profile.
  type: exploit
  tags: [persistence]
  platform: linux
  executor: sh
  command: "openvpn --config forged-client.ovpn --remote #{host.ip} 1194"
- name: VPN subnet sweep
  ability_number: uk-aaaa-06
  technique: T1423
  technique_name: Network Service Scanning
  description: Enumerate live peers on the VPN subnet.
  type: exploit
  tags: [discovery]
  platform: linux
  executor: sh
  command: "nmap -sn -oG - 10.8.10.0/24"
- name: SSH to VPN peer
  ability_number: uk-aaaa-07
  technique: T1021.004
  technique_name: Remote Services - SSH
  description: Log in to a reachable VPN peer over SSH.
  type: exploit
  tags: [lateral-movement]
  platform: linux
  executor: sh
  command: "ssh -o StrictHostKeyChecking=no -i harvested_key root@#{host.ip}"
- name: Sudo elevation check
  ability_number: e3db134c-4aed-4c5a-9607-c50183c9ef9e
  technique: T1548.002
  technique_name: Abuse Elevation Control Mechanism - Sudo
  description: Check for cached sudo credentials and elevate.
  type: exploit
  tags: [privilege-escalation]
  platform: linux
  executor: sh
  command: "sudo -n true && sudo sh -c 'id'"
"""

UK_TEMPLATES = {
    "external": "kali-attacker",
    "cloud": "cloud-fabric",
    "firewall": "vyos-firewall",
    "router": "l3-switch",
    "gateway": "openvpn-gateway",
    "switch": "l2-switch",
    "controller": "wlan-controller",
    "ap": "access-point",
    "container": "alpine-container",
    "dns": "bind9-dns",
}

UK_PROFILE = f"""\
operation: ukoffice_op
steps:
  - ability_number: uk-aaaa-01
    host: {GW}
    node: "netAccess('{HACKER}','{HACKER}','{GW}',http,'80')"
  - ability_number: uk-aaaa-02
    host: {GW}
    node: "softwareCompromisedRemotely('{HACKER}','{GW}')"
  - ability_number: uk-aaaa-03
    host: {GW}
    node: "compromisedVPNClient('{HACKER}','{GW}')"
  - ability_number: uk-aaaa-04
    host: {GW}
    node: "softwareCompromisedLocally('{GW}')"
  - ability_number: uk-aaaa-05
    host: {GW}
    node: "canAccessVPN('{HACKER}','{GW}')"
  - ability_number: uk-aaaa-06
    host: {ALPINE}
    node: "inSubnet('{ALPINE}',vpn)"
  - ability_number: uk-aaaa-07
    host: {ALPINE}
    node: "compromisedVPNClient('{ALPINE}','{GW}')"
  - ability_number: uk-aaaa-07
    host: {ALPINE}
    node: "lateralMovementVPN('{HACKER}','{GW}','{ALPINE}')"
"""


def trace(duration, samples, cpu, ram, io):
    lines = ["timestamp_s,cpu_pct,ram_gb,io_bytes"]
    for i in range(samples):
        ts = duration * i / (samples - 1)
        lines.append(f"{ts:g},{cpu:g},{ram:g},{io:g}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- Bank topology
def bank_topology():
    cams = [f"cam{i:02d}" for i in range(2, 29)]     # 27
    nvrs = [f"nvr{i:02d}" for i in range(2, 30)]     # 28
    pcs = [f"pc{i:02d}" for i in range(2, 30)]       # 28
    nodes = [
        {"id": "cloud1", "class": "cloud"},
        {"id": "fwB", "class": "firewall"},
        {"id": "l3sw", "class": "router"},
        {"id": "r1", "class": "router"},
        {"id": "r2", "class": "router"},
        {"id": "r3", "class": "router"},
        {"id": "sw100", "class": "switch"},
        {"id": "sw110", "class": "switch"},
        {"id": "sw120", "class": "switch"},
        {"id": "cameraA", "class": "camera", "os": "linux"},
        {"id": "DVR", "class": "dvr", "os": "linux"},
        {"id": "adminPC1", "class": "workstation", "os": "linux"},
    ]
    nodes += [{"id": c, "class": "camera"} for c in cams]
    nodes += [{"id": n, "class": "dvr"} for n in nvrs]
    nodes += [{"id": p, "class": "workstation"} for p in pcs]
    assert len(nodes) == 95

    links = [
        {"a": "cloud1", "b": "fwB"},
        {"a": "fwB", "b": "l3sw"},
        {"a": "l3sw", "b": "r1"},
        {"a": "l3sw", "b": "r2"},
        {"a": "l3sw", "b": "r3"},
        {"a": "r1", "b": "sw100"},
        {"a": "r2", "b": "sw110"},
        {"a": "r3", "b": "sw120"},
        {"a": "sw100", "b": "cameraA"},
        {"a": "sw110", "b": "DVR"},
        {"a": "sw120", "b": "adminPC1"},
    ]
    links += [{"a": c, "b": "sw100"} for c in cams]
    links += [{"a": n, "b": "sw110"} for n in nvrs]
    links += [{"a": p, "b": "sw120"} for p in pcs]
    links += [{"a": "cam02", "b": "cam03"}, {"a": "pc02", "b": "pc03"}]
    assert len(links) == 96

    addr = {
        "cloud1": "198.51.100.1", "fwB": "10.1.0.1", "l3sw": "10.1.0.2",
        "r1": "10.1.100.1", "r2": "10.1.110.1", "r3": "10.1.120.1",
        "sw100": "10.1.100.2", "sw110": "10.1.110.2", "sw120": "10.1.120.2",
        "cameraA": "10.1.100.11", "DVR": "10.1.110.11", "adminPC1": "10.1.120.11",
    }
    with_if = (list(addr) + [f"cam{i:02d}" for i in range(2, 8)]
               + [f"nvr{i:02d}" for i in range(2, 8)]
               + [f"pc{i:02d}" for i in range(2, 8)])
    interfaces = []
    for i, n in enumerate(with_if):
        interfaces.append({"node": n, "name": "eth0",
                           "address": addr.get(n, f"10.1.200.{i + 1}")})
    assert len(interfaces) == 30

    software = [
        {"node": "cameraA", "software": "arpd", "version": "ver1"},
        {"node": "cameraA", "software": "sshd", "version": "ver1"},
        {"node": "DVR", "software": "arpd", "version": "ver1"},
        {"node": "DVR", "software": "smbV1", "version": "ver1"},
        {"node": "DVR", "software": "sshd", "version": "ver1"},
        {"node": "pc02", "software": "chrome", "version": "101"},
        {"node": "pc03", "software": "chrome", "version": "101"},
        {"node": "pc04", "software": "vlc", "version": "3.0"},
        {"node": "cam02", "software": "busybox", "version": "1.31"},
        {"node": "nvr02", "software": "busybox", "version": "1.31"},
    ]
    services = [
        {"node": "cameraA", "software": "arpd", "protocol": "tcp", "port": "22",
         "account": "root"},
        {"node": "cameraA", "software": "sshd", "protocol": "tcp", "port": "22",
         "account": "root"},
        {"node": "DVR", "software": "arpd", "protocol": "tcp", "port": "445",
         "account": "root"},
        {"node": "DVR", "software": "smbV1", "protocol": "tcp", "port": "445",
         "account": "root"},
        {"node": "DVR", "software": "sshd", "protocol": "tcp", "port": "445",
         "account": "root"},
        {"node": "cam02", "software": "busybox", "protocol": "tcp", "port": "80",
         "account": "root"},
        {"node": "nvr02", "software": "busybox", "protocol": "tcp", "port": "80",
         "account": "root"},
        {"node": "pc02", "software": "chrome", "protocol": "tcp", "port": "8080",
         "account": "user"},
        {"node": "pc03", "software": "chrome", "protocol": "tcp", "port": "8080",
         "account": "user"},
    ]
    acls = [
        {"src": "adminPC1", "dst": "cameraA", "protocol": "tcp", "port": "22"},
        {"src": "cloud1", "dst": "adminPC1", "protocol": "tcp", "port": "443"},
        {"src": "pc02", "dst": "pc03", "protocol": "tcp", "port": "8080"},
        {"src": "cam02", "dst": "cam03", "protocol": "tcp", "port": "80"},
        {"src": "nvr02", "dst": "nvr03", "protocol": "tcp", "port": "80"},
        {"src": "pc04", "dst": "pc05", "protocol": "tcp", "port": "22"},
    ]
    subnets = [
        {"name": "cams100", "vlan": 100, "members": ["cameraA", "cam02", "cam03"],
         "virtual_ports": ["vp-cam"]},
        {"name": "dvrs110", "vlan": 110, "members": ["DVR", "nvr02", "nvr03"],
         "virtual_ports": ["vp-dvr"]},
        {"name": "admin120", "vlan": 120, "members": ["adminPC1", "pc02", "pc03"],
         "virtual_ports": ["vp-admin"]},
    ]
    bindings = [
        {"flow": "cam-footage", "src_host": "DVR", "path": "/var/footage"},
    ]
    facts = (len(interfaces) + len(links) + len(software) + len(services)
             + len(acls) + sum(len(s["members"]) for s in subnets)
             + sum(len(s["virtual_ports"]) for s in subnets) + len(bindings))
    assert facts == 164, facts
    return {"nodes": nodes, "interfaces": interfaces, "links": links,
            "software": software, "services": services, "acls": acls,
            "subnets": subnets, "bindings": bindings}


def bank_assumptions():
    lines = [
        "hasAccess(attacker,adminPC1,cameraA,tcp,'22').",
        "hasAccess(attacker,cloud1,adminPC1,tcp,'443').",
        "hasAccess(attacker,cameraA,'DVR',tcp,'445').",
        "maliciousInteraction(cameraA,attacker,arpd).",
        "maliciousInteraction(cameraA,attacker,sshd).",
        "deviceOnline(cameraA,'Linux').",
        "malicious(attacker).",
        "ownerAccessible(cameraA,read,'/etc/shadow').",
        "fileOwner(cameraA,'/etc/shadow',root).",
    ]
    online = (["'DVR'", "adminPC1"] + [f"cam{i:02d}" for i in range(2, 7)]
              + [f"nvr{i:02d}" for i in range(2, 5)] + ["pc02", "pc03"])
    lines += [f"deviceOnline({h},'Linux')." for h in online]                    # 12
    lines += [
        "hasAccess(attacker,pc02,cam02,tcp,'22').",
        "hasAccess(attacker,pc03,nvr02,tcp,'22').",
        "hasAccess(attacker,pc04,cam03,tcp,'22').",
        "hasAccess(attacker,pc05,nvr03,tcp,'22').",
        "hasAccess(attacker,cam04,nvr04,tcp,'445').",
        "hasAccess(attacker,cam05,pc06,tcp,'445').",
        "hasAccess(attacker,nvr05,pc07,tcp,'80').",
        "hasAccess(attacker,nvr06,pc08,tcp,'80').",
    ]                                                                            # 8
    lines += [
        "maliciousInteraction(cam02,attacker,busybox).",
        "maliciousInteraction(cam03,attacker,busybox).",
        "maliciousInteraction(nvr02,attacker,busybox).",
        "maliciousInteraction(pc02,attacker,chrome).",
        "maliciousInteraction(pc03,attacker,chrome).",
    ]                                                                            # 5
    lines += [
        "ownerAccessible(adminPC1,read,'/etc/passwd').",
        "ownerAccessible('DVR',read,'/etc/passwd').",
        "ownerAccessible(pc02,read,'/home/user/notes.txt').",
        "ownerAccessible(nvr02,read,'/etc/passwd').",
    ]                                                                            # 4
    lines += [
        "fileOwner(adminPC1,'/etc/passwd',root).",
        "fileOwner('DVR','/etc/passwd',root).",
        "fileOwner(pc02,'/home/user/notes.txt',user).",
        "fileOwner(nvr02,'/etc/passwd',root).",
        "fileOwner(cam02,'/etc/passwd',root).",
    ]                                                                            # 5
    assert len(lines) == 43, len(lines)
    return "\n".join(lines) + "\n"


BANK_RULES = {
    "b06_net_direct_access.pl": """\
% RULE 6 (Net direct access.)
netAccess(P,H1,H2,Proto,Port) :- hasAccess(P,H1,H2,Proto,Port), hacl(H1,H2,Proto,Port).
""",
    "b09_privilege_escalation.pl": """\
% RULE 9 (Privilege escalation using setuid program.)
execCode(P,H,root) :- compromised(H), malicious(P), networkService(H,SW,Proto,Port,root).
% RULE 8 (Local access through executed code.)
localAccess(P,H,root) :- execCode(P,H,root).
""",
    "b10_access_file.pl": """\
% RULE 10 (Can access the local file on the host.)
accessFile(P,H,Owner,Acc,File) :- execCode(P,H,Owner), localFileProtection(H,File,Owner,Acc).
""",
    "b11_file_protection.pl": """\
% RULE 11 (Valid file protection mechanism.)
localFileProtection(H,File,Owner,Acc) :- ownerAccessible(H,Acc,File), fileOwner(H,File,Owner).
""",
    "b16_compromised_host.pl": """\
% RULE 16 (Compromised host cameraA.)
compromised(H) :- ingressToolTransfer(SW,P,H,S,Port), maliciousInteraction(H,P,SW), vulExists(V,SW,Ver,AV,LT,Sev), residesOn(H,SW,Ver), deviceOnline(H,OS).
""",
    "b17_ingress_tool_transfer.pl": """\
% RULE 17 (Net access hop.)
ingressToolTransfer(SW,P,H,S,Port) :- netAccess(P,S,H,Proto,Port), networkService(H,SW,Proto,Port,root).
""",
    "b19_data_inject.pl": """\
% RULE 19 (Inject data over the transfer channel.)
dataInject(P,H,File,S,Port) :- accessFile(P,H,Owner,Acc,File), ingressToolTransfer(SW,P,H,S,Port).
""",
    "b21_credentials_in_files.pl": """\
% RULE 21 (Credentials access in files.)
credentialsAccessInFiles(SW,S) :- dataInject(P,H,File,S,Port), netAccess(P,S,H,Proto,Port), networkService(H,SW,Proto,Port,root).
""",
    "b23_mitm_e2e.pl": """\
% RULE 23 (Man in the middle end to end.)
mitmE2E(P,X,H,D,Proto,Port) :- localAccess(P,H,root), netAccess(P,X,H,Proto,Port), hasAccess(P,H,D,tcp,'445').
""",
    "b24_exec_delegated_code.pl": """\
% RULE 24 (Exploit EternalBlue from cameraA to DVR.)
execDelegatedCode(P,H,D,root) :- compromised(H), hasAccess(P,H,D,tcp,'445'), networkService(D,SW,tcp,'445',root), vulExists(V,SW,Ver,AV,LT,Sev).
""",
    "b25_full_campaign.pl": """\
% RULE 25 (Full campaign against the surveillance chain.)
fullCampaign(P,X,H,D) :- execDelegatedCode(P,H,D,root), credentialsAccessInFiles(SW,X), mitmE2E(P,X,H,D,Proto,Port), netAccess(P,Y,X,tcp,'443').
attackGoal(fullCampaign(attacker,adminPC1,cameraA,'DVR')).
""",
}

BANK_VULNS = """\
cve_id,software,version,access_vector,lose_types,severity
arpSpoofVuln,arpd,ver1,network,caLoss,critical
sshdSpoofVuln,sshd,ver1,network,caLoss,critical
cve_2017_0144,smbV1,ver1,network,codeExecution,critical
"""

BANK_TECHNIQUES = """\
T1552.001
T1105
T1059.004
"""

BANK_MAP_IRS = """\
technique_id,ir_file
T1552.001,b21_credentials_in_files.pl
T1552.001,b19_data_inject.pl
T1552.001,b10_access_file.pl
T1552.001,b11_file_protection.pl
T1105,b17_ingress_tool_transfer.pl
T1105,b06_net_direct_access.pl
T1105,b16_compromised_host.pl
T1105,b09_privilege_escalation.pl
T1059.004,b24_exec_delegated_code.pl
T1059.004,b25_full_campaign.pl
T1059.004,b23_mitm_e2e.pl
"""

BANK_MAP_ABILITIES = """\
technique_id,ability_number
T1552.001,bank-01
T1105,bank-02
T1059.004,bank-03
"""

BANK_ABILITIES = """\
- name: Credentials in files
  ability_number: bank-01
  technique: T1552.001
  technique_name: Unsecured Credentials - Credentials In Files
  description: Search workstation home directories for stored passwords.
  type: exploit
  tags: [credential-access]
  platform: linux
  executor: sh
  command: "grep -ri password /home/ --include='*.txt'"
- name: Ingress tool transfer to camera
  ability_number: bank-02
  technique: T1105
  technique_name: Ingress Tool Transfer
  description: Copy the toolkit onto the compromised camera over SSH.
  type: exploit
  tags: [command-and-control]
  platform: linux
  executor: sh
  command: "scp -i harvested_key tools.tar root@#{host.ip}:/tmp/"
- name: Unix shell on DVR
  ability_number: bank-03
  technique: T1059.004
  technique_name: Command and Scripting Interpreter - Unix Shell
  description: Run a shell command on the DVR after delegation.
  type: exploit
  tags: [execution]
  platform: linux
  executor: sh
  command: "ssh root@#{host.ip} 'sh -c \\"uname -a\\"'"
"""

BANK_TEMPLATES = {
    "cloud": "cloud-fabric",
    "firewall": "vyos-firewall",
    "router": "l3-switch",
    "switch": "l2-switch",
    "camera": "ip-camera",
    "dvr": "dvr-appliance",
    "workstation": "debian-workstation",
}

BANK_PROFILE = """\
operation: bank_op
steps:
  - ability_number: bank-01
    host: adminPC1
    node: "credentialsAccessInFiles(arpd,adminPC1)"
  - ability_number: bank-02
    host: cameraA
    node: "ingressToolTransfer(arpd,attacker,cameraA,adminPC1,'22')"
  - ability_number: bank-03
    host: DVR
    node: "execDelegatedCode(attacker,cameraA,'DVR',root)"
"""

POLICY = {
    "predicates": {
        "vulExists": {"merge_positions": [0, 2]},
        "residesOn": {"merge_positions": [2]},
    }
}

FAULTS_NONE = {"scripts": {}, "network_fail_p": 0.0,
               "exploit_fail_p": 0.0, "detection_fail_p": 0.0}


def main():
    write_json(os.path.join(UK, "topology.json"), uk_topology())
    write(os.path.join(UK, "vulns.csv"), UK_VULNS)
    write(os.path.join(UK, "assumptions.pl"), uk_assumptions())
    for name, text in UK_RULES.items():
        write(os.path.join(UK, "irs", name), text)
    write(os.path.join(UK, "techniques.txt"), UK_TECHNIQUES)
    write(os.path.join(UK, "map_irs.csv"), UK_MAP_IRS)
    write(os.path.join(UK, "map_abilities.csv"), UK_MAP_ABILITIES)
    write(os.path.join(UK, "abilities.yml"), UK_ABILITIES)
    write_json(os.path.join(UK, "templates.json"), UK_TEMPLATES)
    write(os.path.join(UK, "profile.yml"), UK_PROFILE)
    write_json(os.path.join(UK, "faults.json"), FAULTS_NONE)
    write(os.path.join(UK, "traces", "full.csv"),
          trace(726, 6, 13.83, 12.5, 5000000))
    write(os.path.join(UK, "traces", "twin.csv"),
          trace(446, 6, 11.265, 12.03625, 5000000))

    write_json(os.path.join(BANK, "topology.json"), bank_topology())
    write(os.path.join(BANK, "vulns.csv"), BANK_VULNS)
    write(os.path.join(BANK, "assumptions.pl"), bank_assumptions())
    for name, text in BANK_RULES.items():
        write(os.path.join(BANK, "irs", name), text)
    write(os.path.join(BANK, "techniques.txt"), BANK_TECHNIQUES)
    write(os.path.join(BANK, "map_irs.csv"), BANK_MAP_IRS)
    write(os.path.join(BANK, "map_abilities.csv"), BANK_MAP_ABILITIES)
    write(os.path.join(BANK, "abilities.yml"), BANK_ABILITIES)
    write_json(os.path.join(BANK, "templates.json"), BANK_TEMPLATES)
    write(os.path.join(BANK, "profile.yml"), BANK_PROFILE)
    write_json(os.path.join(BANK, "faults.json"), FAULTS_NONE)
    write(os.path.join(BANK, "traces", "full.csv"),
          trace(335.5, 6, 40.8, 8.0, 2000000))
    write(os.path.join(BANK, "traces", "twin.csv"),
          trace(250.5, 6, 21.016, 7.7032, 2000000))

    write_json(os.path.join(ROOT, "policy.json"), POLICY)
    print("fixtures written")


if __name__ == "__main__":
    main()
