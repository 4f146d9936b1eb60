#!/usr/bin/env python3
"""Regenerates posts_corpus.xml, a small Posts.xml-style dump of Java Q&A.

Each topic contributes several accepted answers built from a snippet template
with renamed identifiers, plus a few rows that the ingestion filters must
drop (other-language tags, low scores, short blocks, prose-only blocks,
unanswered questions). Output is deterministic.
"""
import html
import random
import re
from pathlib import Path

TOPICS = [
    ("How to add an image to a JPanel?", ["swing"], """\
JPanel {panel} = new JPanel(new BorderLayout());
BufferedImage {img} = ImageIO.read(new File("{file}.png"));
JLabel label = new JLabel(new ImageIcon({img}));
{panel}.add(label, BorderLayout.CENTER);
frame.getContentPane().add({panel});
"""),
    ("How to generate a random alpha-numeric string?", ["random"], """\
static final String AB = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
static SecureRandom {rnd} = new SecureRandom();

String randomString(int len) {
    StringBuilder {sb} = new StringBuilder(len);
    for (int i = 0; i < len; i++)
        {sb}.append(AB.charAt({rnd}.nextInt(AB.length())));
    return {sb}.toString();
}
"""),
    ("How do I create a file and write to it?", ["file-io"], """\
try (Writer {w} = new BufferedWriter(new OutputStreamWriter(
        new FileOutputStream("{file}.txt"), StandardCharsets.UTF_8))) {
    {w}.write("something");
    {w}.write(System.lineSeparator());
} catch (IOException {ex}) {
    {ex}.printStackTrace();
}
"""),
    ("How do I invoke a Java method when given the method name as a string?", ["reflection"], """\
java.lang.reflect.Method {m};
try {
    {m} = obj.getClass().getMethod("{name}", String.class);
    Object {res} = {m}.invoke(obj, "argument");
} catch (NoSuchMethodException | IllegalAccessException | InvocationTargetException e) {
    throw new RuntimeException(e);
}
"""),
    ("Remove HTML tags from a String", ["html-parsing"], """\
public static String {name}(String {input}) {
    if ({input} == null) {
        return null;
    }
    return Jsoup.parse({input}).text();
}
"""),
    ("How to get the path of a running JAR file?", ["jar"], """\
String {path} = {cls}.class.getProtectionDomain().getCodeSource().getLocation().getPath();
String {decoded} = URLDecoder.decode({path}, "UTF-8");
File {jar} = new File({decoded});
System.out.println({jar}.getParentFile().getAbsolutePath());
"""),
    ("Getting a File's MD5 Checksum in Java", ["md5", "checksum"], """\
MessageDigest {md} = MessageDigest.getInstance("MD5");
try (InputStream {is} = Files.newInputStream(Paths.get("{file}.bin"));
     DigestInputStream dis = new DigestInputStream({is}, {md})) {
    byte[] buffer = new byte[8192];
    while (dis.read(buffer) != -1) { }
}
byte[] {digest} = {md}.digest();
"""),
    ("Loading a properties file from Java package", ["properties"], """\
Properties {props} = new Properties();
try (InputStream {in} = {cls}.class.getResourceAsStream("/{file}.properties")) {
    {props}.load({in});
}
String value = {props}.getProperty("db.url", "jdbc:h2:mem:test");
"""),
    ("How can I play sound in Java?", ["audio"], """\
AudioInputStream {stream} = AudioSystem.getAudioInputStream(new File("{file}.wav"));
Clip {clip} = AudioSystem.getClip();
{clip}.open({stream});
{clip}.start();
Thread.sleep({clip}.getMicrosecondLength() / 1000);
"""),
    ("What is the best way to SFTP a file from a server?", ["sftp", "jsch"], """\
JSch {jsch} = new JSch();
Session {session} = {jsch}.getSession("user", "example.com", 22);
{session}.setPassword("secret");
{session}.setConfig("StrictHostKeyChecking", "no");
{session}.connect();
ChannelSftp {sftp} = (ChannelSftp) {session}.openChannel("sftp");
{sftp}.connect();
{sftp}.get("/remote/{file}.txt", "{file}.txt");
"""),
    ("How to read a CSV file?", ["csv"], """\
try (BufferedReader {br} = new BufferedReader(new FileReader("{file}.csv"))) {
    String {line};
    while (({line} = {br}.readLine()) != null) {
        String[] {cols} = {line}.split(",");
        System.out.println({cols}[0] + " -> " + {cols}.length);
    }
}
"""),
    ("How to generate MD5 hash code?", ["md5", "hash"], """\
public static String {name}(String {input}) throws NoSuchAlgorithmException {
    MessageDigest {md} = MessageDigest.getInstance("MD5");
    byte[] {digest} = {md}.digest({input}.getBytes(StandardCharsets.UTF_8));
    return String.format("%032x", new BigInteger(1, {digest}));
}
"""),
    ("How to send a packet via UDP?", ["udp", "networking"], """\
DatagramSocket {socket} = new DatagramSocket();
byte[] {buf} = "hello".getBytes(StandardCharsets.UTF_8);
InetAddress {addr} = InetAddress.getByName("localhost");
DatagramPacket {packet} = new DatagramPacket({buf}, {buf}.length, {addr}, 4445);
{socket}.send({packet});
{socket}.close();
"""),
    ("How to split a string?", ["string", "split"], """\
String {text} = "004-034556";
String[] {parts} = {text}.split("-");
String {first} = {parts}[0]; // 004
String {second} = {parts}[1]; // 034556
System.out.println({first} + " and " + {second});
"""),
    ("How to play an audio file?", ["javafx", "audio"], """\
Media {media} = new Media(new File("{file}.mp3").toURI().toString());
MediaPlayer {player} = new MediaPlayer({media});
{player}.setOnEndOfMedia(() -> {player}.dispose());
{player}.play();
"""),
    ("How to upload a file to FTP?", ["ftp", "apache-commons"], """\
FTPClient {ftp} = new FTPClient();
{ftp}.connect("ftp.example.com");
{ftp}.login("user", "password");
{ftp}.setFileType(FTP.BINARY_FILE_TYPE);
try (InputStream {in} = new FileInputStream("{file}.zip")) {
    boolean done = {ftp}.storeFile("{file}.zip", {in});
}
{ftp}.logout();
"""),
    ("How to initialize a thread?", ["multithreading"], """\
Thread {thread} = new Thread(new Runnable() {
    @Override
    public void run() {
        System.out.println("running in " + Thread.currentThread().getName());
    }
});
{thread}.start();
{thread}.join();
"""),
    ("How to connect to a JDBC database?", ["jdbc"], """\
String {url} = "jdbc:mysql://localhost:3306/{name}";
try (Connection {conn} = DriverManager.getConnection({url}, "user", "pass");
     Statement {stmt} = {conn}.createStatement();
     ResultSet {rs} = {stmt}.executeQuery("SELECT id FROM items")) {
    while ({rs}.next()) System.out.println({rs}.getInt(1));
}
"""),
    ("How to read a ZIP archive?", ["zip"], """\
try (ZipFile {zip} = new ZipFile("{file}.zip")) {
    Enumeration<? extends ZipEntry> {entries} = {zip}.entries();
    while ({entries}.hasMoreElements()) {
        ZipEntry {entry} = {entries}.nextElement();
        InputStream {stream} = {zip}.getInputStream({entry});
        System.out.println({entry}.getName());
    }
}
"""),
    ("How to send an email?", ["email", "javamail"], """\
Properties {props} = new Properties();
{props}.put("mail.smtp.host", "smtp.example.com");
Session {session} = Session.getInstance({props});
MimeMessage {msg} = new MimeMessage({session});
{msg}.setFrom(new InternetAddress("me@example.com"));
{msg}.setRecipients(Message.RecipientType.TO, "you@example.com");
{msg}.setSubject("Hello");
{msg}.setText("Body text");
Transport.send({msg});
"""),
]

VARIANTS = 150
NAMES = ["alpha", "beta", "gamma", "delta", "omega", "item", "data", "value", "result", "target"]
SLOTS = ["panel", "img", "file", "rnd", "sb", "w", "ex", "m", "res", "name", "input", "path", "cls",
         "decoded", "jar", "md", "is", "digest", "props", "in", "stream", "clip", "jsch", "session",
         "sftp", "br", "line", "cols", "socket", "buf", "addr", "packet", "text", "parts", "first",
         "second", "media", "player", "ftp", "thread", "url", "conn", "stmt", "rs", "zip", "entries",
         "entry", "msg"]


def fill(template, rng, variant):
    mapping = {}
    for slot in SLOTS:
        if variant == 0:
            mapping[slot] = slot
        else:
            mapping[slot] = slot + rng.choice(NAMES).capitalize()
    mapping["cls"] = "Main" if variant == 0 else rng.choice(["App", "Loader", "Util", "Service"])
    return re.sub(r"\{(\w+)\}", lambda m: mapping.get(m.group(1), m.group(0)), template)


def row(**attrs):
    parts = []
    for key, value in attrs.items():
        parts.append('%s="%s"' % (key, html.escape(str(value), quote=True).replace("\n", "&#xA;")))
    return "  <row " + " ".join(parts) + " />"


def code_body(prose, code):
    return "<p>%s</p>\n\n<pre><code>%s</code></pre>\n" % (prose, html.escape(code, quote=False))


def main():
    rng = random.Random(20220501)
    rows = []
    next_id = 1
    day = 0

    def date():
        nonlocal day
        day += 1
        return "20%02d-%02d-%02dT12:00:00.000" % (10 + day // 300, 1 + (day // 28) % 12, 1 + day % 28)

    def qa(title, tags, answer_body, score, question_tags=None):
        nonlocal next_id
        qid, aid = next_id, next_id + 1
        next_id += 2
        tag_text = "".join("<%s>" % t for t in (question_tags or ["java"] + tags))
        rows.append(row(Id=qid, PostTypeId=1, AcceptedAnswerId=aid, CreationDate=date(), Score=rng.randint(1, 50),
                        Body="<p>%s</p>" % html.escape(title), Title=title, Tags=tag_text))
        rows.append(row(Id=aid, PostTypeId=2, ParentId=qid, CreationDate=date(), Score=score, Body=answer_body))

    for title, tags, template in TOPICS:
        for variant in range(VARIANTS):
            code = fill(template, rng, variant)
            qa(title, tags, code_body("Something like this works:", code), rng.randint(2, 40))
        # dropped by the score threshold
        qa(title, tags, code_body("Try this.", fill(template, rng, VARIANTS + 1)), 1)
        # dropped by the language filter
        qa(title, tags, code_body("In JS:", fill(template, rng, VARIANTS + 2)), 12, question_tags=["java", "javascript"])

    # dropped by length, code-likeness and missing blocks
    qa("Short snippet", ["misc"], code_body("Just:", "x.close();\n"), 9)
    qa("Prose in a block", ["misc"],
       code_body("Output:", "The build finished without errors and all of the tests were reported as passing "
                            "by the continuous integration server this morning\n"), 9)
    qa("Inline only", ["misc"], "<p>Call <code>list.clear()</code> before reuse.</p>", 9)
    # unanswered question
    rows.append(row(Id=next_id, PostTypeId=1, CreationDate=date(), Score=0, Body="<p>anyone?</p>",
                    Tags="<java>"))

    out = Path(__file__).with_name("posts_corpus.xml")
    out.write_text('<?xml version="1.0" encoding="utf-8"?>\n<posts>\n' + "\n".join(rows) + "\n</posts>\n",
                   encoding="utf-8")


if __name__ == "__main__":
    main()
